"""Finite relational structures, embeddings and homomorphisms.

Domains are always ``{0, ..., n-1}``.  A structure stores one frozenset of
integer tuples per relation symbol; everything here is immutable so structures
can be hashed and shared between processes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import permutations, product
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DomainError, SignatureError


class Signature:
    """Ordered list of ``(name, arity)`` pairs."""

    __slots__ = ("symbols", "_arity")

    def __init__(self, symbols: Iterable[tuple[str, int]]):
        syms = []
        arity = {}
        for name, k in symbols:
            name = str(name)
            if not isinstance(k, int) or isinstance(k, bool) or k < 1:
                raise SignatureError(f"symbol {name!r} has invalid arity {k!r}")
            if name in arity:
                raise SignatureError(f"duplicate symbol {name!r}")
            arity[name] = k
            syms.append((name, k))
        self.symbols: tuple[tuple[str, int], ...] = tuple(syms)
        self._arity = arity

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.symbols)

    def arity(self, name: str) -> int:
        try:
            return self._arity[name]
        except KeyError:
            raise SignatureError(f"unknown symbol {name!r}") from None

    def __contains__(self, name: object) -> bool:
        return name in self._arity

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Signature) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __repr__(self) -> str:
        return f"Signature({list(self.symbols)!r})"

    def extend(self, more: Iterable[tuple[str, int]]) -> Signature:
        return Signature(self.symbols + tuple(more))

    def restrict(self, names: Iterable[str]) -> Signature:
        keep = set(names)
        for n in keep:
            self.arity(n)
        return Signature(s for s in self.symbols if s[0] in keep)

    def to_json(self) -> list[dict]:
        return [{"name": n, "arity": k} for n, k in self.symbols]

    @classmethod
    def from_json(cls, data: Sequence[Mapping]) -> Signature:
        try:
            return cls((d["name"], d["arity"]) for d in data)
        except (KeyError, TypeError) as exc:
            raise SignatureError(f"malformed signature: {exc}") from None


class FiniteStructure:
    """A finite relational structure over a :class:`Signature`."""

    __slots__ = ("signature", "size", "relations", "_key", "_hash")

    def __init__(
        self,
        signature: Signature | Iterable[tuple[str, int]],
        size: int,
        relations: Mapping[str, Iterable[Sequence[int]]] | None = None,
    ):
        if not isinstance(signature, Signature):
            signature = Signature(signature)
        if not isinstance(size, int) or size < 0:
            raise DomainError(f"invalid domain size {size!r}")
        relations = relations or {}
        for name in relations:
            if name not in signature:
                raise SignatureError(f"relation {name!r} is not in the signature")
        rels = {}
        for name, k in signature:
            tuples = set()
            for t in relations.get(name, ()):
                t = tuple(t)
                if len(t) != k:
                    raise SignatureError(f"tuple {t} has wrong arity for {name!r} (expected {k})")
                for x in t:
                    if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < size:
                        raise DomainError(f"tuple {t} of {name!r} leaves the domain of size {size}")
                tuples.add(t)
            rels[name] = frozenset(tuples)
        self.signature = signature
        self.size = size
        self.relations = MappingProxyType(rels)
        self._key = None
        self._hash = None

    # identity -----------------------------------------------------------------

    def key(self) -> tuple:
        if self._key is None:
            self._key = (
                self.signature.symbols,
                self.size,
                tuple(tuple(sorted(self.relations[n])) for n in self.signature.names),
            )
        return self._key

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return isinstance(other, FiniteStructure) and self.key() == other.key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self) -> str:
        rels = {n: sorted(self.relations[n]) for n in self.signature.names}
        return f"FiniteStructure(size={self.size}, relations={rels})"

    def __getitem__(self, name: str) -> frozenset:
        try:
            return self.relations[name]
        except KeyError:
            raise SignatureError(f"unknown symbol {name!r}") from None

    @property
    def domain(self) -> range:
        return range(self.size)

    # derived structures -------------------------------------------------------

    def reduct(self, names: Iterable[str]) -> FiniteStructure:
        sig = self.signature.restrict(names)
        return FiniteStructure(sig, self.size, {n: self.relations[n] for n in sig.names})

    def expand(self, symbols: Iterable[tuple[str, int]], relations: Mapping[str, Iterable]) -> FiniteStructure:
        sig = self.signature.extend(symbols)
        rels = dict(self.relations)
        rels.update(relations)
        return FiniteStructure(sig, self.size, rels)

    def relabel(self, new_index: Sequence[int]) -> FiniteStructure:
        """Isomorphic copy in which element ``x`` becomes ``new_index[x]``."""
        if sorted(new_index) != list(range(self.size)):
            raise DomainError("relabelling must be a permutation of the domain")
        rels = {n: [tuple(new_index[x] for x in t) for t in ts] for n, ts in self.relations.items()}
        return FiniteStructure(self.signature, self.size, rels)

    def with_signature(self, signature: Signature) -> FiniteStructure:
        """Same relations read over ``signature`` (missing symbols are empty)."""
        return FiniteStructure(signature, self.size, {n: ts for n, ts in self.relations.items() if ts})

    # serialization ------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "signature": self.signature.to_json(),
            "size": self.size,
            "relations": {n: [list(t) for t in sorted(self.relations[n])] for n in self.signature.names},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> FiniteStructure:
        try:
            sig = Signature.from_json(data["signature"])
            size = data["size"]
            rels = data.get("relations", {})
        except (KeyError, TypeError) as exc:
            raise SignatureError(f"malformed structure: {exc}") from None
        return cls(sig, size, rels)

    def dumps(self) -> str:
        return dumps(self.to_json())

    @classmethod
    def loads(cls, text: str) -> FiniteStructure:
        return cls.from_json(json.loads(text))


def dumps(obj) -> str:
    """Canonical compact JSON used for every serialized artefact."""
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=True)


@dataclass(frozen=True, eq=False)
class Embedding:
    source: FiniteStructure
    target: FiniteStructure
    map: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.map[x]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Embedding) and self.map == other.map and (
            self.source == other.source and self.target == other.target
        )

    def __hash__(self) -> int:
        return hash(self.map)

    def compose(self, inner: Embedding) -> Embedding:
        """``self ∘ inner``."""
        if inner.target != self.source:
            raise DomainError("inner embedding does not land in the source")
        return Embedding(inner.source, self.target, tuple(self.map[x] for x in inner.map))

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.map)


# builders ---------------------------------------------------------------------


def linear_order(n: int, symbol: str = "<", signature: Signature | None = None) -> FiniteStructure:
    sig = signature or Signature([(symbol, 2)])
    return FiniteStructure(sig, n, {symbol: [(i, j) for i in range(n) for j in range(i + 1, n)]})


def graph(n: int, edges: Iterable[tuple[int, int]], symbol: str = "E", signature: Signature | None = None) -> FiniteStructure:
    """Simple graph: the edge relation is stored symmetrically."""
    sig = signature or Signature([(symbol, 2)])
    rel = set()
    for u, v in edges:
        if u == v:
            raise DomainError("graphs have no loops")
        rel.add((u, v))
        rel.add((v, u))
    return FiniteStructure(sig, n, {symbol: rel})


def complete_graph(n: int, symbol: str = "E") -> FiniteStructure:
    return graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)], symbol)


def path_graph(n: int, symbol: str = "E") -> FiniteStructure:
    return graph(n, [(i, i + 1) for i in range(n - 1)], symbol)


def cycle_graph(n: int, symbol: str = "E") -> FiniteStructure:
    return graph(n, [(i, (i + 1) % n) for i in range(n)], symbol)


def empty_structure(signature: Signature | Iterable[tuple[str, int]], n: int = 0) -> FiniteStructure:
    return FiniteStructure(signature, n)


def disjoint_union(A: FiniteStructure, B: FiniteStructure) -> FiniteStructure:
    """Plain disjoint union; elements of ``B`` are shifted by ``|A|``."""
    _same_signature(A, B)
    rels = {n: list(A.relations[n]) + [tuple(x + A.size for x in t) for t in B.relations[n]] for n in A.signature.names}
    return FiniteStructure(A.signature, A.size + B.size, rels)


# substructures ----------------------------------------------------------------


def substructure(S: FiniteStructure, subset: Iterable[int]) -> tuple[FiniteStructure, tuple[int, ...]]:
    """Induced substructure on ``subset``.

    Returns the substructure (relabelled to ``0..k-1`` in increasing order of
    the original elements) and the inclusion map as a tuple.
    """
    elems = sorted(set(subset))
    for x in elems:
        if not isinstance(x, int) or not 0 <= x < S.size:
            raise DomainError(f"element {x!r} is outside the domain of size {S.size}")
    pos = {x: i for i, x in enumerate(elems)}
    rels = {}
    for name in S.signature.names:
        rels[name] = [tuple(pos[x] for x in t) for t in S.relations[name] if all(x in pos for x in t)]
    return FiniteStructure(S.signature, len(elems), rels), tuple(elems)


def _same_signature(A: FiniteStructure, B: FiniteStructure) -> None:
    if A.signature != B.signature:
        raise SignatureError(f"signatures differ: {A.signature!r} vs {B.signature!r}")


# embeddings and homomorphisms -------------------------------------------------


def _embedding_checks(A: FiniteStructure, B: FiniteStructure, strong: bool) -> list[list[tuple]]:
    """Per element ``i``, the tuples over ``0..i`` that mention ``i``.

    Each entry is ``(tuple, required, target_relation)``.  For homomorphisms
    only tuples of ``A`` are needed; for embeddings every tuple is checked both
    ways.
    """
    checks: list[list[tuple]] = [[] for _ in range(A.size)]
    for name, k in A.signature:
        RA = A.relations[name]
        RB = B.relations[name]
        if strong:
            for i in range(A.size):
                for t in product(range(i + 1), repeat=k):
                    if i in t:
                        checks[i].append((t, t in RA, RB))
        else:
            for t in RA:
                checks[max(t)].append((t, True, RB))
    return checks


def _search_maps(
    A: FiniteStructure,
    B: FiniteStructure,
    injective: bool,
    strong: bool,
    allowed: Sequence[Iterable[int]] | None,
    limit: int | None,
) -> list[tuple[int, ...]]:
    _same_signature(A, B)
    n = A.size
    if n == 0:
        return [()]
    checks = _embedding_checks(A, B, strong)
    cand = [sorted(set(allowed[i])) for i in range(n)] if allowed is not None else [list(range(B.size))] * n
    img = [0] * n
    used = set()
    out: list[tuple[int, ...]] = []

    def rec(i: int) -> bool:
        ci = checks[i]
        for y in cand[i]:
            if injective and y in used:
                continue
            img[i] = y
            ok = True
            for t, req, RB in ci:
                if (tuple(img[x] for x in t) in RB) != req:
                    if req or strong:
                        ok = False
                        break
            if not ok:
                continue
            if i + 1 == n:
                out.append(tuple(img))
                if limit is not None and len(out) >= limit:
                    return True
            else:
                used.add(y)
                stop = rec(i + 1)
                used.discard(y)
                if stop:
                    return True
        return False

    rec(0)
    return out


def embedding_maps(
    A: FiniteStructure,
    B: FiniteStructure,
    allowed: Sequence[Iterable[int]] | None = None,
    limit: int | None = None,
) -> list[tuple[int, ...]]:
    """All embeddings ``A -> B`` as image tuples, in lexicographic order.

    ``allowed[i]`` optionally restricts the images of element ``i``.
    """
    return _search_maps(A, B, injective=True, strong=True, allowed=allowed, limit=limit)


def enumerate_embeddings(A: FiniteStructure, B: FiniteStructure) -> list[Embedding]:
    return [Embedding(A, B, m) for m in embedding_maps(A, B)]


def is_embedding(A: FiniteStructure, B: FiniteStructure, m: Sequence[int]) -> bool:
    """Direct check, independent of the backtracking search."""
    _same_signature(A, B)
    m = tuple(m)
    if len(m) != A.size or len(set(m)) != len(m) or any(not 0 <= y < B.size for y in m):
        return False
    inv = {y: x for x, y in enumerate(m)}
    for name in A.signature.names:
        RA, RB = A.relations[name], B.relations[name]
        if any(tuple(m[x] for x in t) not in RB for t in RA):
            return False
        for t in RB:
            if all(y in inv for y in t) and tuple(inv[y] for y in t) not in RA:
                return False
    return True


def automorphisms(A: FiniteStructure) -> list[tuple[int, ...]]:
    return embedding_maps(A, A)


def is_rigid(A: FiniteStructure) -> bool:
    return len(embedding_maps(A, A, limit=2)) == 1


def homomorphism_maps(A: FiniteStructure, B: FiniteStructure, limit: int | None = None) -> list[tuple[int, ...]]:
    return _search_maps(A, B, injective=False, strong=False, allowed=None, limit=limit)


def enumerate_homomorphisms(A: FiniteStructure, B: FiniteStructure) -> list[tuple[int, ...]]:
    return homomorphism_maps(A, B)


def maps_homomorphically(A: FiniteStructure, B: FiniteStructure) -> bool:
    return bool(homomorphism_maps(A, B, limit=1))


def in_forb(family: Iterable[FiniteStructure], A: FiniteStructure) -> bool:
    """True iff no member of ``family`` maps homomorphically into ``A``."""
    return not any(maps_homomorphically(F, A) for F in family)


def is_irreducible(F: FiniteStructure) -> bool:
    together = set()
    for ts in F.relations.values():
        for t in ts:
            s = sorted(set(t))
            for i, x in enumerate(s):
                for y in s[i + 1:]:
                    together.add((x, y))
    return all((x, y) in together for x in range(F.size) for y in range(x + 1, F.size))


def is_linear_order(S: FiniteStructure, symbol: str, strict: bool = True) -> bool:
    R = S[symbol]
    if S.signature.arity(symbol) != 2:
        raise SignatureError(f"{symbol!r} is not binary")
    n = S.size
    if strict:
        if any(x == y for x, y in R):
            return False
        if len(R) != n * (n - 1) // 2:
            return False
    else:
        if any((x, x) not in R for x in range(n)):
            return False
        if len(R) != n * (n + 1) // 2:
            return False
    for x in range(n):
        for y in range(x + 1, n):
            if ((x, y) in R) == ((y, x) in R):
                return False
    for x, y in R:
        for z in range(n):
            if (y, z) in R and (x, z) not in R:
                return False
    return True


def order_ranks(S: FiniteStructure, symbol: str = "<") -> list[int]:
    """Rank of every element under the strict linear order ``symbol``."""
    if not is_linear_order(S, symbol):
        raise SignatureError(f"{symbol!r} is not a strict linear order")
    R = S[symbol]
    return [sum((y, x) in R for y in range(S.size)) for x in range(S.size)]


def sort_by_order(S: FiniteStructure, symbol: str = "<") -> FiniteStructure:
    """Isomorphic copy whose order ``symbol`` is the natural order of indices."""
    return S.relabel(order_ranks(S, symbol))


# isomorphism ------------------------------------------------------------------


def _element_invariants(S: FiniteStructure) -> list[tuple]:
    inv: list[list] = [[] for _ in range(S.size)]
    for name in S.signature.names:
        counts: list[dict] = [{} for _ in range(S.size)]
        for t in S.relations[name]:
            for x in set(t):
                pattern = tuple(i for i, y in enumerate(t) if y == x)
                counts[x][pattern] = counts[x].get(pattern, 0) + 1
        for x in range(S.size):
            inv[x].append(tuple(sorted(counts[x].items())))
    base = [tuple(v) for v in inv]
    # one refinement round: multiset of neighbour invariants
    nbr: list[list] = [[] for _ in range(S.size)]
    for name in S.signature.names:
        for t in S.relations[name]:
            for i, x in enumerate(t):
                nbr[x].append((name, i, tuple(base[y] for y in t)))
    return [(base[x], tuple(sorted(nbr[x]))) for x in range(S.size)]


def canonical_form(S: FiniteStructure) -> tuple:
    """Isomorphism-invariant key; equal keys iff the structures are isomorphic.

    Elements are grouped into cells by an invariant and only relabellings that
    respect the cell order are tried, so rigid-looking structures are cheap.
    Intended for small domains.
    """
    inv = _element_invariants(S)
    cells: dict = {}
    for x in range(S.size):
        cells.setdefault(inv[x], []).append(x)
    ordered = [cells[k] for k in sorted(cells)]
    best = None
    names = S.signature.names
    for choice in product(*(permutations(c) for c in ordered)):
        new = [0] * S.size
        pos = 0
        for block in choice:
            for x in block:
                new[x] = pos
                pos += 1
        enc = tuple(tuple(sorted(tuple(new[x] for x in t) for t in S.relations[n])) for n in names)
        if best is None or enc < best:
            best = enc
    return (S.signature.symbols, S.size, tuple(sorted(cells)), best)


def is_isomorphic(A: FiniteStructure, B: FiniteStructure) -> bool:
    if A.signature != B.signature or A.size != B.size:
        return False
    if any(len(A.relations[n]) != len(B.relations[n]) for n in A.signature.names):
        return False
    return bool(embedding_maps(A, B, limit=1))


def dedupe_isomorphic(structures: Iterable[FiniteStructure]) -> list[FiniteStructure]:
    seen = set()
    out = []
    for S in structures:
        k = canonical_form(S)
        if k not in seen:
            seen.add(k)
            out.append(S)
    return out
