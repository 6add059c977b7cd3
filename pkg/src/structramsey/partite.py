"""Partite structures, the product-style power and the partite amalgamation
method for building Ramsey witnesses.

A partite structure is a structure together with a level map onto
``0..n-1``.  Embeddings between partite structures with the same number of
levels must preserve levels; as plain structures this is the same as carrying
along the reflexive preorder ``level(x) <= level(y)``, which is what
:meth:`PartiteStructure.to_structure` materializes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from .arrow import order_arrow_witness, verify_arrow
from .core import (
    FiniteStructure,
    Signature,
    dumps,
    embedding_maps,
    in_forb,
    is_irreducible,
    is_linear_order,
    sort_by_order,
    substructure,
)
from .errors import BudgetExceeded, ClassError, DomainError, InvariantError, SignatureError
from .hales_jewett import enumerate_lines, hj_number

LEVEL_SYMBOL = "__le"
DEFAULT_MAX_SIZE = 20_000


class PartiteStructure:
    __slots__ = ("base", "levels", "n_levels")

    def __init__(self, base: FiniteStructure, levels: Sequence[int], n_levels: int | None = None):
        levels = tuple(levels)
        if len(levels) != base.size:
            raise DomainError("one level per element is required")
        if n_levels is None:
            n_levels = max(levels) + 1 if levels else 0
        if any(not isinstance(l, int) or not 0 <= l < n_levels for l in levels):
            raise DomainError(f"levels must lie in 0..{n_levels - 1}")
        if LEVEL_SYMBOL in base.signature:
            raise SignatureError(f"{LEVEL_SYMBOL!r} is reserved")
        self.base = base
        self.levels = levels
        self.n_levels = n_levels

    @property
    def size(self) -> int:
        return self.base.size

    @property
    def signature(self) -> Signature:
        return self.base.signature

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PartiteStructure)
            and self.base == other.base
            and self.levels == other.levels
            and self.n_levels == other.n_levels
        )

    def __hash__(self) -> int:
        return hash((self.base, self.levels, self.n_levels))

    def __repr__(self) -> str:
        return f"PartiteStructure(levels={list(self.levels)}, base={self.base!r})"

    def members(self, level: int) -> list[int]:
        return [x for x, l in enumerate(self.levels) if l == level]

    def level_sizes(self) -> list[int]:
        sizes = [0] * self.n_levels
        for l in self.levels:
            sizes[l] += 1
        return sizes

    def is_transversal(self) -> bool:
        return self.level_sizes() == [1] * self.n_levels

    def element_at(self, level: int) -> int:
        """The unique element on ``level`` of a transversal structure."""
        found = self.members(level)
        if len(found) != 1:
            raise DomainError(f"level {level} does not hold exactly one element")
        return found[0]

    def to_structure(self) -> FiniteStructure:
        le = [(x, y) for x in range(self.size) for y in range(self.size) if self.levels[x] <= self.levels[y]]
        rels = dict(self.base.relations)
        rels[LEVEL_SYMBOL] = le
        return FiniteStructure(self.base.signature.extend([(LEVEL_SYMBOL, 2)]), self.size, rels)

    def substructure(self, subset: Iterable[int]) -> tuple[PartiteStructure, tuple[int, ...]]:
        S, incl = substructure(self.base, subset)
        return PartiteStructure(S, [self.levels[x] for x in incl], self.n_levels), incl

    def restrict_levels(self, chosen: Sequence[int]) -> tuple[PartiteStructure, tuple[int, ...]]:
        """Substructure on the given levels, with level ``chosen[j]`` renamed ``j``."""
        pos = {l: j for j, l in enumerate(chosen)}
        S, incl = substructure(self.base, [x for x, l in enumerate(self.levels) if l in pos])
        return PartiteStructure(S, [pos[self.levels[x]] for x in incl], len(chosen)), incl

    def to_json(self) -> dict:
        out = self.base.to_json()
        out["levels"] = list(self.levels)
        out["n_levels"] = self.n_levels
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> PartiteStructure:
        if "levels" not in data:
            raise DomainError("partite structure needs a 'levels' list")
        return cls(FiniteStructure.from_json(data), data["levels"], data.get("n_levels"))

    def dumps(self) -> str:
        return dumps(self.to_json())


def transversal(S: FiniteStructure) -> PartiteStructure:
    """``S`` with element ``i`` alone on level ``i``."""
    return PartiteStructure(S, range(S.size), S.size)


def partite_embeddings(X: PartiteStructure, Y: PartiteStructure) -> list[tuple[int, ...]]:
    if X.n_levels != Y.n_levels:
        raise DomainError("partite embeddings need the same number of levels")
    by_level = [Y.members(l) for l in range(Y.n_levels)]
    return embedding_maps(X.base, Y.base, allowed=[by_level[l] for l in X.levels])


def is_template(A: PartiteStructure, B: PartiteStructure) -> bool:
    """Every tuple of ``B`` projects, level by level, onto a tuple of ``A``."""
    if not A.is_transversal() or A.n_levels != B.n_levels:
        raise DomainError("template test needs a transversal with the same levels")
    if A.signature != B.signature:
        raise SignatureError("signatures differ")
    pi = [A.element_at(l) for l in range(A.n_levels)]
    for name in B.signature.names:
        RA = A.base[name]
        for t in B.base[name]:
            if tuple(pi[B.levels[x]] for x in t) not in RA:
                return False
    return True


class _Builder:
    """Incremental partite structure used for amalgamation."""

    def __init__(self, signature: Signature, n_levels: int):
        self.signature = signature
        self.n_levels = n_levels
        self.levels: list[int] = []
        self.rels: dict[str, set] = {n: set() for n in signature.names}

    @classmethod
    def from_partite(cls, P: PartiteStructure) -> _Builder:
        b = cls(P.signature, P.n_levels)
        b.levels = list(P.levels)
        for n in P.signature.names:
            b.rels[n] = set(P.base[n])
        return b

    @property
    def size(self) -> int:
        return len(self.levels)

    def add_copy(self, piece: FiniteStructure, piece_levels: Sequence[int], shared: Mapping[int, int]) -> tuple[int, ...]:
        """Glue a copy of ``piece``; ``shared`` sends some piece elements to
        existing elements, the rest become fresh.  Returns the full map."""
        m = []
        for x in range(piece.size):
            if x in shared:
                y = shared[x]
                if self.levels[y] != piece_levels[x]:
                    raise InvariantError("amalgamation would break the level map")
                m.append(y)
            else:
                m.append(len(self.levels))
                self.levels.append(piece_levels[x])
        for n in piece.signature.names:
            self.rels[n].update(tuple(m[x] for x in t) for t in piece[n])
        return tuple(m)

    def build(self) -> PartiteStructure:
        return PartiteStructure(FiniteStructure(self.signature, len(self.levels), self.rels), self.levels, self.n_levels)


# ---------------------------------------------------------------------------
# the power construction


def power_points(B: PartiteStructure, d: int) -> list[tuple[int, ...]]:
    """Elements of the ``d``-th power in index order: level by level, then
    lexicographically as ``d``-tuples of elements of ``B``."""
    pts = []
    for l in range(B.n_levels):
        pts.extend(product(B.members(l), repeat=d))
    return pts


def nr_power(B: PartiteStructure, A: PartiteStructure, d: int, max_size: int | None = None) -> PartiteStructure:
    """``d``-th power of ``B`` over the transversal ``A``.

    A tuple of ``d``-tuples ``(u^1, ..., u^h)`` is related iff for some
    ``w`` in the same relation of ``B`` every coordinate column
    ``(u^1_q, ..., u^h_q)`` is either ``w`` itself or lies inside a single
    copy of ``A``, and at least one column equals ``w``.
    """
    if d < 1:
        raise ValueError("d must be positive")
    if not A.is_transversal() or A.n_levels != B.n_levels:
        raise DomainError("the power is taken over a transversal with the same levels")
    if A.signature != B.signature:
        raise SignatureError("signatures differ")
    limit = DEFAULT_MAX_SIZE if max_size is None else max_size
    size = sum(s ** d for s in B.level_sizes())
    if size > limit:
        raise BudgetExceeded(f"power would have {size} elements (limit {limit})", size, limit)
    pts = power_points(B, d)
    index = {p: i for i, p in enumerate(pts)}
    embs = partite_embeddings(A, B)
    at = [A.element_at(l) for l in range(A.n_levels)]
    rels = {}
    for name in B.signature.names:
        out = set()
        for w in B.base[name]:
            levs = [B.levels[x] for x in w]
            opts = {w}
            for g in embs:
                opts.add(tuple(g[at[l]] for l in levs))
            opts = sorted(opts)
            for cols in product(opts, repeat=d):
                if w not in cols:
                    continue
                out.add(tuple(index[tuple(cols[q][s] for q in range(d))] for s in range(len(w))))
        rels[name] = out
    levels = [B.levels[p[0]] for p in pts]
    return PartiteStructure(FiniteStructure(B.signature, len(pts), rels), levels, B.n_levels)


def power_map(B: PartiteStructure, d: int, columns: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Index in the power of the point whose ``q``-th coordinate is the image
    under ``columns[q]`` (a map from some structure into ``B``), for each
    source element."""
    index = {p: i for i, p in enumerate(power_points(B, d))}
    n = len(columns[0])
    return tuple(index[tuple(columns[q][x] for q in range(d))] for x in range(n))


def alpha_embedding(B: PartiteStructure, A: PartiteStructure, d: int, alpha: Sequence[int]) -> tuple[int, ...]:
    """``a -> (g_{alpha_1}(a), ..., g_{alpha_d}(a))`` with ``g_1, g_2, ...`` the
    embeddings of ``A`` into ``B`` in lexicographic order (1-based)."""
    embs = partite_embeddings(A, B)
    return power_map(B, d, [embs[k - 1] for k in alpha])


def line_embedding(B: PartiteStructure, A: PartiteStructure, d: int, word: Sequence) -> tuple[int, ...]:
    """The map ``B -> power`` attached to a combinatorial line.

    Every element ``u`` of ``B`` must lie in some copy ``g_k(A)``; it is sent
    to ``g_{L(k)}(a)`` where ``g_k(a) = u``.  Raises :class:`InvariantError`
    if two copies through ``u`` disagree or some element is in no copy.
    """
    from .hales_jewett import CombinatorialLine

    embs = partite_embeddings(A, B)
    L = CombinatorialLine(len(embs), d, tuple(word))
    index = {p: i for i, p in enumerate(power_points(B, d))}
    image: dict[int, int] = {}
    for k, g in enumerate(embs, start=1):
        alpha = L.point(k)
        for a, u in enumerate(g):
            v = index[tuple(embs[c - 1][a] for c in alpha)]
            if image.setdefault(u, v) != v:
                raise InvariantError(f"line map is not well defined at element {u}")
    if len(image) != B.size:
        raise InvariantError("some element lies in no copy of the pattern")
    return tuple(image[u] for u in range(B.size))


# ---------------------------------------------------------------------------
# partite lemma


@dataclass
class PartiteLemmaWitness:
    A: PartiteStructure
    B: PartiteStructure
    r: int
    structure: PartiteStructure
    core: tuple[int, ...]  # elements of B covered by copies of A
    m: int
    d: int
    mode: str  # "lines": glued along combinatorial lines, "all": along every copy
    copies: list[tuple[int, ...]]  # designated embeddings B -> structure

    def summary(self) -> dict:
        return {"m": self.m, "d": self.d, "mode": self.mode, "size": self.structure.size, "copies": len(self.copies)}


def partite_lemma_witness(
    A: PartiteStructure,
    B: PartiteStructure,
    r: int,
    d_max: int = 6,
    budget: int | None = None,
    node_budget: int | None = None,
    max_size: int | None = None,
    verify_limit: int = 8,
) -> PartiteLemmaWitness:
    """Build ``C`` with ``C -> (B)^A_r`` among partite structures.

    Elements of ``B`` outside every copy of ``A`` are split off, the rest is
    raised to a power whose dimension makes every ``r``-coloring of the index
    cube contain a monochromatic combinatorial line, and the split-off part is
    glued back onto the copies of ``B`` attached to lines.  When the line
    dimension is out of reach the dimension is raised until the arrow is
    verified directly, and then every copy is designated; that fallback is
    only tried when the covered part of ``B`` has at most ``verify_limit``
    elements.
    """
    if not A.is_transversal():
        raise DomainError("the pattern must be a transversal")
    if A.n_levels != B.n_levels:
        raise DomainError("pattern and target need the same levels")
    embs = partite_embeddings(A, B)
    if len(embs) <= 1 or r == 1:
        return PartiteLemmaWitness(A, B, r, B, tuple(sorted({x for g in embs for x in g})), len(embs), 1, "trivial", [tuple(range(B.size))])
    core = tuple(sorted({x for g in embs for x in g}))
    Bstar, incl = B.substructure(core)
    m = len(embs)
    mode = "lines"
    try:
        d = hj_number(m, r, d_max, budget=budget)
        if d is None:
            raise BudgetExceeded("no line dimension found", None, d_max)
        power = nr_power(Bstar, A, d, max_size=max_size)
        star_copies = [line_embedding(Bstar, A, d, L.word) for L in enumerate_lines(m, d)]
    except BudgetExceeded:
        mode = "all"
        if Bstar.size > verify_limit:
            raise BudgetExceeded(
                f"line dimension for {m} copies is out of reach and a {Bstar.size}-element target is too large to verify directly",
                Bstar.size,
                verify_limit,
            )
        for d in range(1, d_max + 1):
            power = nr_power(Bstar, A, d, max_size=max_size)
            if verify_arrow(power.to_structure(), Bstar.to_structure(), A.to_structure(), r, budget=budget, node_budget=node_budget).holds:
                break
        else:
            raise BudgetExceeded(f"no dimension up to {d_max} verified", None, d_max)
        star_copies = partite_embeddings(Bstar, power)
    star_copies = list(dict.fromkeys(star_copies))

    builder = _Builder.from_partite(power)
    pos = {x: i for i, x in enumerate(core)}
    copies = []
    for g in star_copies:
        shared = {x: g[pos[x]] for x in core}
        copies.append(builder.add_copy(B.base, B.levels, shared))
    E = builder.build()
    return PartiteLemmaWitness(A, B, r, E, core, m, d, mode, copies)


# ---------------------------------------------------------------------------
# the partite construction


@dataclass
class ConstructionResult:
    structure: FiniteStructure
    partite: PartiteStructure | None
    p: int
    q: int
    stages: list[dict] = field(default_factory=list)

    def stage_log(self) -> str:
        return "".join(json.dumps(s, sort_keys=True) + "\n" for s in self.stages)


def _place_compact(builder: _Builder, Btau: FiniteStructure, placement: Sequence[int], family) -> None:
    b = Btau.size
    for size in range(b, 0, -1):
        for X in combinations(range(b), size):
            BX, inclX = substructure(Btau, X)
            current = FiniteStructure(builder.signature, builder.size, builder.rels)
            by_level: dict[int, list[int]] = {}
            for y, l in enumerate(builder.levels):
                by_level.setdefault(l, []).append(y)
            allowed = [by_level.get(placement[x], []) for x in inclX]
            for emb in embedding_maps(BX, current, allowed=allowed):
                if size == b:
                    return
                trial = _Builder.from_partite(builder.build())
                trial.add_copy(Btau, placement, dict(zip(inclX, emb)))
                if family is None or in_forb(family, FiniteStructure(trial.signature, trial.size, trial.rels)):
                    builder.levels, builder.rels = trial.levels, trial.rels
                    return
    builder.add_copy(Btau, placement, {})


def _initial(Btau: FiniteStructure, placements: Sequence[Sequence[int]], n_levels: int, strategy: str, family=None) -> PartiteStructure:
    builder = _Builder(Btau.signature, n_levels)
    for placement in placements:
        if strategy == "disjoint":
            builder.add_copy(Btau, placement, {})
        elif strategy == "compact":
            _place_compact(builder, Btau, placement, family)
        else:
            raise ValueError(f"unknown initial strategy {strategy!r}")
    return builder.build()


def _amalgamate(
    P: PartiteStructure,
    Atau: FiniteStructure,
    pattern_levels: Sequence[Sequence[int]],
    r: int,
    stages: list[dict],
    family=None,
    check_template: FiniteStructure | None = None,
    d_max: int = 6,
    budget: int | None = None,
    node_budget: int | None = None,
    max_size: int | None = None,
) -> PartiteStructure:
    limit = DEFAULT_MAX_SIZE if max_size is None else max_size
    At = transversal(Atau)
    for k, levs in enumerate(pattern_levels, start=1):
        D, incl = P.restrict_levels(levs)
        if check_template is not None and not is_template(At, D):
            raise InvariantError(f"step {k}: the pattern is not a template for the restriction")
        w = partite_lemma_witness(At, D, r, d_max=d_max, budget=budget, node_budget=node_budget, max_size=max_size)
        stage = {"stage": k, "levels": list(levs), "D": D.size, "P_prev": P.size, **w.summary()}
        if w.mode == "trivial":
            stage["P"] = P.size
            stages.append(stage)
            continue
        E = w.structure
        if family is not None and not in_forb(family, E.base):
            raise InvariantError(f"step {k}: the partite witness left the forbidden class")
        grow = E.size + len(w.copies) * (P.size - D.size)
        if grow > limit:
            raise BudgetExceeded(f"step {k} would build {grow} elements (limit {limit})", grow, limit)
        builder = _Builder(P.signature, P.n_levels)
        builder.add_copy(E.base, [levs[l] for l in E.levels], {})
        pos_in_D = {x: i for i, x in enumerate(incl)}
        for h in w.copies:
            builder.add_copy(P.base, P.levels, {x: h[pos_in_D[x]] for x in incl})
        P = builder.build()
        stage["P"] = P.size
        stages.append(stage)
    return P


def _linearize(P: PartiteStructure, signature: Signature, order: str) -> FiniteStructure:
    ranking = sorted(range(P.size), key=lambda x: (P.levels[x], x))
    new = [0] * P.size
    for i, x in enumerate(ranking):
        new[x] = i
    rels = {n: [tuple(new[x] for x in t) for t in P.base[n]] for n in P.signature.names}
    rels[order] = [(i, j) for i in range(P.size) for j in range(i + 1, P.size)]
    return FiniteStructure(signature, P.size, rels)


def _split_order(S: FiniteStructure, order: str) -> tuple[FiniteStructure, FiniteStructure]:
    if order not in S.signature or not is_linear_order(S, order):
        raise ClassError(f"{order!r} must be a strict linear order")
    S = sort_by_order(S, order)
    return S, S.reduct([n for n in S.signature.names if n != order])


def partite_construction(
    A: FiniteStructure,
    B: FiniteStructure,
    r: int,
    order: str = "<",
    initial: str = "compact",
    d_max: int = 6,
    budget: int | None = None,
    node_budget: int | None = None,
    max_size: int | None = None,
) -> ConstructionResult:
    """Ordered ``C`` with ``C -> (B)^A_r`` by partite amalgamation.

    ``initial='disjoint'`` starts from one disjoint copy of ``B`` per choice
    of levels; ``'compact'`` reuses already present pieces of ``B`` when
    placing each copy, which keeps every later step far smaller.
    """
    if A.signature != B.signature:
        raise SignatureError("signatures differ")
    A, Atau = _split_order(A, order)
    B, Btau = _split_order(B, order)
    if r == 1 or A.size > B.size or not embedding_maps(A, B, limit=1):
        return ConstructionResult(B, None, B.size, 0, [{"stage": "shortcut", "size": B.size}])
    a, b = A.size, B.size
    p = order_arrow_witness(b, a, r, budget=budget).size
    placements = list(combinations(range(p), b))
    P = _initial(Btau, placements, p, initial)
    stages = [{"stage": 0, "p": p, "initial": initial, "P": P.size}]
    pattern_levels = list(combinations(range(p), a))
    P = _amalgamate(P, Atau, pattern_levels, r, stages, d_max=d_max, budget=budget, node_budget=node_budget, max_size=max_size)
    return ConstructionResult(_linearize(P, A.signature, order), P, p, len(pattern_levels), stages)


def partite_construction_forb(
    A: FiniteStructure,
    B: FiniteStructure,
    r: int,
    family: Sequence[FiniteStructure],
    ambient: FiniteStructure | None = None,
    order: str = "<",
    initial: str = "compact",
    d_max: int = 6,
    budget: int | None = None,
    node_budget: int | None = None,
    max_size: int | None = None,
) -> ConstructionResult:
    """Like :func:`partite_construction` but the result also omits
    homomorphic images of every member of ``family`` (all irreducible, over
    the signature without the order).

    The levels are the elements of an ordered ``ambient`` with
    ``ambient -> (B)^A_r``; when none is given it is built with
    :func:`partite_construction`.
    """
    if A.signature != B.signature:
        raise SignatureError("signatures differ")
    A, Atau = _split_order(A, order)
    B, Btau = _split_order(B, order)
    fam = list(family)
    for F in fam:
        if F.signature != Atau.signature:
            raise SignatureError("forbidden structures must use the unordered signature")
        if not is_irreducible(F):
            raise ClassError("forbidden structures must be irreducible")
    if not in_forb(fam, Atau) or not in_forb(fam, Btau):
        raise ClassError("pattern and target must avoid the forbidden family")
    if r == 1 or A.size > B.size or not embedding_maps(A, B, limit=1):
        return ConstructionResult(B, None, B.size, 0, [{"stage": "shortcut", "size": B.size}])
    if ambient is None:
        ambient = partite_construction(A, B, r, order=order, initial=initial, d_max=d_max, budget=budget, max_size=max_size).structure
    C, Ctau = _split_order(ambient, order)
    f_maps = embedding_maps(B, C)
    g_maps = embedding_maps(A, C)
    P = _initial(Btau, f_maps, C.size, initial, family=fam)
    if not in_forb(fam, P.base):
        raise InvariantError("initial structure meets the forbidden family")
    if not is_template(transversal(Ctau), P):
        raise InvariantError("ambient is not a template for the initial structure")
    stages = [{"stage": 0, "p": C.size, "initial": initial, "P": P.size, "copies_B": len(f_maps)}]
    P = _amalgamate(
        P, Atau, g_maps, r, stages, family=fam, check_template=Ctau,
        d_max=d_max, budget=budget, node_budget=node_budget, max_size=max_size,
    )
    out = _linearize(P, A.signature, order)
    if not in_forb(fam, out.reduct(Atau.signature.names)):
        raise InvariantError("result meets the forbidden family")
    return ConstructionResult(out, P, C.size, len(g_maps), stages)
