"""Operations that build new structures or classes from old ones, and the
amalgamation tests."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Callable, Sequence

from .classes import ClassGenerator
from .core import FiniteStructure, Signature, canonical_form, embedding_maps, substructure
from .errors import ClassError, DomainError, SignatureError


def disjoint_union_p(A1: FiniteStructure, A2: FiniteStructure, symbol: str = "P") -> FiniteStructure:
    """Disjoint union with a fresh unary ``symbol`` marking the copy of ``A1``."""
    if A1.signature != A2.signature:
        raise SignatureError("signatures differ")
    if symbol in A1.signature:
        raise SignatureError(f"{symbol!r} is already used")
    n1 = A1.size
    rels = {n: list(A1[n]) + [tuple(x + n1 for x in t) for t in A2[n]] for n in A1.signature.names}
    rels[symbol] = [(x,) for x in range(n1)]
    return FiniteStructure(A1.signature.extend([(symbol, 1)]), n1 + A2.size, rels)


# products ---------------------------------------------------------------------


def eq_symbol(i: int) -> str:
    return f"__eq_{i}"


def product_signature(signatures: Sequence[Signature]) -> Signature:
    syms = []
    for i, sig in enumerate(signatures, start=1):
        syms.extend(sig.symbols)
        syms.append((eq_symbol(i), 2))
    return Signature(syms)


def full_product(factors: Sequence[FiniteStructure]) -> FiniteStructure:
    """Product over the disjoint union of the factor signatures plus one
    equivalence per factor (same ``i``-th coordinate).

    Elements are coordinate tuples in lexicographic order; a relation of
    factor ``i`` holds of a tuple of elements iff it holds of their ``i``-th
    coordinates.
    """
    if not factors:
        raise ValueError("need at least one factor")
    names = [n for F in factors for n in F.signature.names]
    if len(set(names)) != len(names):
        raise SignatureError("factor signatures must be disjoint")
    sig = product_signature([F.signature for F in factors])
    points = list(product(*(range(F.size) for F in factors)))
    index = {p: i for i, p in enumerate(points)}
    by_coord = [[[] for _ in range(F.size)] for F in factors]
    for p in points:
        for i, x in enumerate(p):
            by_coord[i][x].append(index[p])
    rels = {}
    for i, F in enumerate(factors):
        for name in F.signature.names:
            rels[name] = [t for w in F[name] for t in product(*(by_coord[i][x] for x in w))]
        rels[eq_symbol(i + 1)] = [(a, b) for x in range(F.size) for a in by_coord[i][x] for b in by_coord[i][x]]
    return FiniteStructure(sig, len(points), rels)


def product_coordinates(factors: Sequence[FiniteStructure]) -> list[tuple[int, ...]]:
    return list(product(*(range(F.size) for F in factors)))


def project(S: FiniteStructure, factor_signature: Signature, i: int) -> tuple[FiniteStructure, list[int]]:
    """Quotient of ``S`` by its ``i``-th equivalence, over factor ``i``'s symbols.

    Classes are numbered by their least element.  Returns the quotient and
    the class of every element.
    """
    E = S[eq_symbol(i)]
    cls = [-1] * S.size
    k = 0
    for x in range(S.size):
        if cls[x] < 0:
            for y in range(S.size):
                if (x, y) in E:
                    cls[y] = k
            k += 1
    rels = {n: {tuple(cls[x] for x in t) for t in S[n]} for n in factor_signature.names}
    return FiniteStructure(factor_signature, k, rels), cls


@dataclass
class ProductWitness:
    structure: FiniteStructure
    factors: tuple[FiniteStructure, FiniteStructure]
    s: int  # colors used for the first factor
    A_parts: tuple[FiniteStructure, FiniteStructure]
    B_parts: tuple[FiniteStructure, FiniteStructure]


def product_witness(
    A: FiniteStructure,
    B: FiniteStructure,
    r: int,
    factor_signatures: Sequence[Signature],
    witness1: Callable[[FiniteStructure, FiniteStructure, int], FiniteStructure],
    witness2: Callable[[FiniteStructure, FiniteStructure, int], FiniteStructure],
) -> ProductWitness:
    """``C1 ⊠ C2`` with ``C1 ⊠ C2 -> (B)^A_r`` for ``A``, ``B`` in a product class.

    ``witnessI(Bi, Ai, colors)`` must return a host arrowing ``Bi`` for
    ``Ai``-colorings with that many colors.  The second factor is handled
    with ``r`` colors, the first with ``r^s`` where ``s = |Emb(A2, C2)|``.
    """
    if len(factor_signatures) != 2:
        raise ValueError("exactly two factors")
    if A.signature != product_signature(factor_signatures) or B.signature != A.signature:
        raise SignatureError("structures must use the product signature")
    A1, _ = project(A, factor_signatures[0], 1)
    A2, _ = project(A, factor_signatures[1], 2)
    B1, _ = project(B, factor_signatures[0], 1)
    B2, _ = project(B, factor_signatures[1], 2)
    C2 = witness2(B2, A2, r)
    s = len(embedding_maps(A2, C2))
    C1 = witness1(B1, A1, r ** s)
    return ProductWitness(full_product([C1, C2]), (C1, C2), s, (A1, A2), (B1, B2))


def product_embedding(e1: Sequence[int], e2: Sequence[int], n2: int) -> dict[tuple[int, int], int]:
    """Map ``(x1, x2) -> index of (e1(x1), e2(x2))`` in a two-factor product
    whose second factor has ``n2`` elements."""
    return {(x1, x2): e1[x1] * n2 + e2[x2] for x1 in range(len(e1)) for x2 in range(len(e2))}


def product_replay(w: ProductWitness, A: FiniteStructure, B: FiniteStructure, color: Callable[[tuple[int, ...]], int]) -> tuple[int, ...]:
    """Monochromatic copy of ``B`` for a coloring of ``Emb(A, C1 ⊠ C2)``,
    found by the factor-by-factor argument: first a copy of ``B1`` on which
    the induced ``r^s``-coloring is constant, then a copy of ``B2``."""
    C1, C2 = w.factors
    A1, A2 = w.A_parts
    B1, B2 = w.B_parts
    n2 = C2.size
    cls_a = [project(A, A1.signature, 1)[1], project(A, A2.signature, 2)[1]]
    cls_b = [project(B, B1.signature, 1)[1], project(B, B2.signature, 2)[1]]

    def lift(e1, e2, cls):
        return tuple(e1[cls[0][x]] * n2 + e2[cls[1][x]] for x in range(len(cls[0])))

    emb2 = embedding_maps(A2, C2)

    def xi(e1):
        return tuple(color(lift(e1, e2, cls_a)) for e2 in emb2)

    a1_in_b1 = embedding_maps(A1, B1)
    f1 = next(
        (f for f in embedding_maps(B1, C1) if len({xi(tuple(f[x] for x in g)) for g in a1_in_b1}) == 1),
        None,
    )
    if f1 is None:
        raise ClassError("first factor does not arrow")
    profile = dict(zip(emb2, xi(tuple(f1[x] for x in a1_in_b1[0]))))
    a2_in_b2 = embedding_maps(A2, B2)
    f2 = next(
        (f for f in embedding_maps(B2, C2) if len({profile[tuple(f[x] for x in g)] for g in a2_in_b2}) == 1),
        None,
    )
    if f2 is None:
        raise ClassError("second factor does not arrow")
    return lift(f1, f2, cls_b)


# superposition -------------------------------------------------------------------


def superpose(A1: FiniteStructure, A2: FiniteStructure, alignment: Sequence[int]) -> FiniteStructure:
    """Structure on ``A1``'s domain over both signatures; element ``x`` of
    ``A2`` is identified with ``alignment[x]``."""
    if A1.size != A2.size or sorted(alignment) != list(range(A1.size)):
        raise DomainError("alignment must be a bijection between equal-size domains")
    if set(A1.signature.names) & set(A2.signature.names):
        raise SignatureError("signatures must be disjoint")
    rels = dict(A1.relations)
    for n in A2.signature.names:
        rels[n] = [tuple(alignment[x] for x in t) for t in A2[n]]
    return FiniteStructure(A1.signature.extend(A2.signature.symbols), A1.size, rels)


def superposition_class(C1: ClassGenerator, C2: ClassGenerator) -> ClassGenerator:
    sig = C1.signature.extend(C2.signature.symbols)
    n1, n2 = C1.signature.names, C2.signature.names

    def ok(S):
        return S.reduct(n1) in C1 and S.reduct(n2) in C2

    def gen(n):
        return superposition_members(C1, C2, n, up_to=False)

    return ClassGenerator(f"{C1.name}*{C2.name}", sig, ok, gen)


def superposition_members(C1: ClassGenerator, C2: ClassGenerator, n: int, up_to: bool = False) -> list[FiniteStructure]:
    """Isomorphism types of superpositions with ``n`` elements (or at most
    ``n`` when ``up_to``)."""
    sizes = range(n + 1) if up_to else [n]
    out = []
    seen = set()
    for k in sizes:
        for X1 in C1.generate(k):
            for X2 in C2.generate(k):
                for perm in permutations(range(k)):
                    S = superpose(X1, X2, perm)
                    key = canonical_form(S)
                    if key not in seen:
                        seen.add(key)
                        out.append(S)
    return out


# constant expansion ----------------------------------------------------------


def constant_symbol(name: str, position: int, point: int) -> str:
    return f"{name}@{position}:{point}"


def expand_with_constants(S: FiniteStructure, points: Sequence[int], eq: str = "=") -> FiniteStructure:
    """Drop the points and record, for every relation of arity ``k >= 2``
    (equality included) and every position, which ``(k-1)``-tuples complete
    the relation with each dropped point there.

    The new symbols are named ``R@i:j`` for position ``i`` (1-based) and the
    ``j``-th listed point (1-based).
    """
    pts = list(points)
    if len(set(pts)) != len(pts) or any(not 0 <= p < S.size for p in pts):
        raise DomainError("points must be distinct domain elements")
    if eq in S.signature:
        raise SignatureError(f"{eq!r} is reserved for equality")
    rest = [x for x in range(S.size) if x not in set(pts)]
    pos = {x: i for i, x in enumerate(rest)}
    base, _ = substructure(S, rest)
    symbols, rels = [], {}
    sources = [(n, k, S[n]) for n, k in S.signature if k >= 2]
    sources.append((eq, 2, {(x, x) for x in range(S.size)}))
    for name, k, R in sources:
        for i in range(1, k + 1):
            for j, d in enumerate(pts, start=1):
                sym = constant_symbol(name, i, j)
                if sym in S.signature:
                    raise SignatureError(f"name clash on {sym!r}")
                symbols.append((sym, k - 1))
                out = []
                for t in R:
                    if t[i - 1] != d:
                        continue
                    rest_t = t[: i - 1] + t[i:]
                    if all(x in pos for x in rest_t):
                        out.append(tuple(pos[x] for x in rest_t))
                rels[sym] = out
    return base.expand(symbols, rels)


# amalgamation ----------------------------------------------------------------------


@dataclass
class Amalgam:
    structure: FiniteStructure
    f1: tuple[int, ...]
    f2: tuple[int, ...]
    identified: int  # elements of B2 merged with elements of B1 outside the common part


def amalgam(
    C: ClassGenerator,
    A: FiniteStructure,
    B1: FiniteStructure,
    B2: FiniteStructure,
    e1: Sequence[int],
    e2: Sequence[int],
    strong: bool = False,
) -> Amalgam | None:
    """Some ``D`` in ``C`` with embeddings ``f1: B1 -> D``, ``f2: B2 -> D``
    and ``f1∘e1 = f2∘e2``, or None.

    Candidates place ``B1`` first and then the new elements of ``B2``,
    trying fewer identifications first; with ``strong`` no identifications
    beyond the common part are allowed.  Relations on mixed tuples are
    decided by backtracking, a group of tuples at a time, testing class
    membership on every completed initial segment.
    """
    e1, e2 = tuple(e1), tuple(e2)
    if A.size == B1.size and B2 in C:
        # B1 is the common part, so B2 itself amalgamates
        inv = {y: a for a, y in enumerate(e1)}
        return Amalgam(B2, tuple(e2[inv[x]] for x in range(B1.size)), tuple(range(B2.size)), 0)
    if A.size == B2.size and B1 in C:
        inv = {y: a for a, y in enumerate(e2)}
        return Amalgam(B1, tuple(range(B1.size)), tuple(e1[inv[y]] for y in range(B2.size)), 0)
    shared2 = {e2[a]: e1[a] for a in range(A.size)}
    new2 = [y for y in range(B2.size) if y not in shared2]
    free1 = [x for x in range(B1.size) if x not in set(e1)]
    max_ident = 0 if strong else min(len(new2), len(free1))
    for n_id in range(max_ident + 1):
        for chosen in combinations(new2, n_id):
            for targets in permutations(free1, n_id):
                ident = dict(zip(chosen, targets))
                f2 = []
                nxt = B1.size
                for y in range(B2.size):
                    if y in shared2:
                        f2.append(shared2[y])
                    elif y in ident:
                        f2.append(ident[y])
                    else:
                        f2.append(nxt)
                        nxt += 1
                D = _complete(C, B1, B2, tuple(f2), nxt)
                if D is not None:
                    return Amalgam(D, tuple(range(B1.size)), tuple(f2), n_id)
    return None


def _complete(C: ClassGenerator, B1: FiniteStructure, B2: FiniteStructure, f2: tuple[int, ...], n: int) -> FiniteStructure | None:
    sig = B1.signature
    im1 = set(range(B1.size))
    im2 = set(f2)
    inv2 = {y: x for x, y in enumerate(f2)}
    fixed: dict[str, set] = {name: set() for name in sig.names}
    decided: dict[str, set] = {name: set() for name in sig.names}  # tuples whose status is fixed
    for name, k in sig:
        for t in product(range(n), repeat=k):
            s = set(t)
            in1 = s <= im1
            in2 = s <= im2
            if in1:
                v = t in B1[name]
                if in2:
                    v2 = tuple(inv2[x] for x in t) in B2[name]
                    if v != v2:
                        return None
            elif in2:
                v = tuple(inv2[x] for x in t) in B2[name]
            else:
                continue
            decided[name].add(t)
            if v:
                fixed[name].add(t)
    # open slots, grouped by their set of elements
    groups: dict[frozenset, list] = {}
    for name, k in sig:
        for t in product(range(n), repeat=k):
            if t not in decided[name]:
                groups.setdefault(frozenset(t), []).append((name, t))
    order = sorted(groups, key=lambda g: (max(g), len(g), sorted(g)))
    position = {g: i for i, g in enumerate(order)}
    last_of_max = {}
    for i, g in enumerate(order):
        last_of_max[max(g)] = i
    rels = {name: set(ts) for name, ts in fixed.items()}

    def ready_at(U: frozenset) -> int:
        # index of the last open group inside U
        idx = -1
        items = sorted(U)
        for k in range(1, len(items) + 1):
            for sub in combinations(items, k):
                idx = max(idx, position.get(frozenset(sub), -1))
        return idx

    # after group i, these element sets are fully decided and get tested
    local_checks: list[list[frozenset]] = [[] for _ in order]
    for g in order:
        for U in [g] + [g | {z} for z in range(n) if z not in g]:
            j = ready_at(U)
            if j >= 0 and U not in local_checks[j]:
                local_checks[j].append(U)

    def member_on(U) -> bool:
        S, _ = substructure(FiniteStructure(sig, n, rels), U)
        return C.contains(S)

    def rec(i: int) -> bool:
        if i == len(order):
            return C.contains(FiniteStructure(sig, n, rels))
        slots = groups[order[i]]
        top = max(order[i])
        for bits in product((False, True), repeat=len(slots)):
            for (name, t), b in zip(slots, bits):
                if b:
                    rels[name].add(t)
            ok = all(member_on(U) for U in local_checks[i])
            if ok and (last_of_max[top] != i or member_on(range(top + 1))) and rec(i + 1):
                return True
            for (name, t), b in zip(slots, bits):
                if b:
                    rels[name].discard(t)
        return False

    if not order:
        D = FiniteStructure(sig, n, rels)
        return D if C.contains(D) else None
    if rec(0):
        return FiniteStructure(sig, n, rels)
    return None


@dataclass
class AmalgamationReport:
    holds: bool
    checked: int
    counterexample: tuple | None = None  # (A, B1, B2, e1, e2)


def check_amalgamation_property(C: ClassGenerator, n: int, strong: bool = False) -> AmalgamationReport:
    """Try every ``A ⊆ B1, B2`` with all three of size at most ``n``."""
    members = C.members(n)
    checked = 0
    for A in members:
        for B1 in members:
            if B1.size < A.size:
                continue
            m1 = embedding_maps(A, B1)
            if not m1:
                continue
            for B2 in members:
                if B2.size < A.size:
                    continue
                m2 = embedding_maps(A, B2)
                for e1 in m1:
                    for e2 in m2:
                        checked += 1
                        if amalgam(C, A, B1, B2, e1, e2, strong=strong) is None:
                            return AmalgamationReport(False, checked, (A, B1, B2, e1, e2))
    return AmalgamationReport(True, checked)


def check_jep(C: ClassGenerator, n: int) -> AmalgamationReport:
    members = C.members(n)
    empty = FiniteStructure(C.signature, 0)
    checked = 0
    for B1 in members:
        for B2 in members:
            checked += 1
            if amalgam(C, empty, B1, B2, (), ()) is None:
                return AmalgamationReport(False, checked, (empty, B1, B2, (), ()))
    return AmalgamationReport(True, checked)
