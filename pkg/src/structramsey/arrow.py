"""Deciding partition arrows ``C -> (B)^A_r`` on explicit finite structures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .core import FiniteStructure, dumps, embedding_maps, linear_order, automorphisms, _same_signature
from .errors import BudgetExceeded
from .search import DEFAULT_NODE_BUDGET, default_budget, find_proper_coloring, sweep


@dataclass(frozen=True, eq=False)
class Coloring:
    """Colors ``1..r`` of ``Emb(pattern, host)``, indexed by the lexicographic
    position of each embedding."""

    pattern: FiniteStructure
    host: FiniteStructure
    r: int
    assignment: tuple[int, ...]

    def embeddings(self) -> list[tuple[int, ...]]:
        return embedding_maps(self.pattern, self.host)

    def as_map(self) -> dict[tuple[int, ...], int]:
        return dict(zip(self.embeddings(), self.assignment))

    def to_json(self) -> dict[str, int]:
        return {str(i): c for i, c in enumerate(self.assignment)}


@dataclass(frozen=True, eq=False)
class ArrowCertificate:
    verdict: str  # "holds" or "fails"
    checked: int
    coloring: Coloring | None = None
    colorings: tuple[Coloring, ...] | None = None  # simultaneous arrows
    backend: str = "sweep"

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_json(self) -> dict:
        out: dict = {"verdict": self.verdict}
        if self.coloring is not None:
            out["coloring"] = self.coloring.to_json()
        if self.colorings is not None:
            out["colorings"] = [c.to_json() for c in self.colorings]
        out["checked"] = self.checked
        return out

    def dumps(self) -> str:
        return dumps(self.to_json())


@dataclass(frozen=True)
class ArrowInstance:
    """Embedding index tables for one pattern."""

    a_maps: list[tuple[int, ...]]
    b_maps: list[tuple[int, ...]]
    copies: list[tuple[int, ...]]  # per B-copy, indices into a_maps of f∘Emb(A,B)


def arrow_instance(C: FiniteStructure, B: FiniteStructure, A: FiniteStructure) -> ArrowInstance:
    _same_signature(A, B)
    _same_signature(B, C)
    a_maps = embedding_maps(A, C)
    index = {m: i for i, m in enumerate(a_maps)}
    ab = embedding_maps(A, B)
    b_maps = embedding_maps(B, C)
    copies = [tuple(index[tuple(f[x] for x in g)] for g in ab) for f in b_maps]
    return ArrowInstance(a_maps, b_maps, copies)


def check_arrow(
    C: FiniteStructure,
    B: FiniteStructure,
    A: FiniteStructure,
    r: int,
    budget: int | None = None,
    jobs: int = 1,
) -> ArrowCertificate:
    """Exhaustive counter sweep over all ``r``-colorings of ``Emb(A, C)``.

    The first embedding always gets color 1.  On failure the returned
    certificate carries the lexicographically first refuting coloring.
    """
    return check_arrow_defect(C, B, A, r, 1, budget=budget, jobs=jobs)


def check_arrow_defect(
    C: FiniteStructure,
    B: FiniteStructure,
    A: FiniteStructure,
    r: int,
    k: int,
    budget: int | None = None,
    jobs: int = 1,
) -> ArrowCertificate:
    """Like :func:`check_arrow` but a copy of ``B`` only needs at most ``k``
    colors on its copies of ``A``."""
    if r < 1 or k < 1:
        raise ValueError("r and k must be positive")
    inst = arrow_instance(C, B, A)
    n = len(inst.a_maps)
    targets = sorted({tuple(sorted(c)) for c in inst.copies})
    res = sweep(
        n,
        r,
        [(t,) for t in targets],
        threshold=k,
        fixed=(0,) if n and r > 1 else (),
        budget=budget,
        jobs=jobs,
    )
    if res.holds:
        return ArrowCertificate("holds", res.checked)
    return ArrowCertificate("fails", res.checked, Coloring(A, C, r, res.coloring))


def check_simultaneous(
    C: FiniteStructure,
    B: FiniteStructure,
    patterns: Sequence[FiniteStructure],
    r: int,
    budget: int | None = None,
    jobs: int = 1,
) -> ArrowCertificate:
    """For every tuple of colorings (one per pattern) some copy of ``B`` is
    monochromatic in each of them at once."""
    insts = [arrow_instance(C, B, A) for A in patterns]
    offsets = []
    n = 0
    for inst in insts:
        offsets.append(n)
        n += len(inst.a_maps)
    n_b = len(insts[0].b_maps) if insts else len(embedding_maps(B, C))
    targets = set()
    for j in range(n_b):
        targets.add(tuple(tuple(sorted(off + i for i in inst.copies[j])) for inst, off in zip(insts, offsets)))
    fixed = [off for inst, off in zip(insts, offsets) if inst.a_maps and r > 1]
    res = sweep(n, r, sorted(targets), fixed=fixed, budget=budget, jobs=jobs)
    if res.holds:
        return ArrowCertificate("holds", res.checked)
    cols = tuple(
        Coloring(A, C, r, res.coloring[off:off + len(inst.a_maps)]) for A, inst, off in zip(patterns, insts, offsets)
    )
    return ArrowCertificate("fails", res.checked, colorings=cols)


def hypergraph_edges(C: FiniteStructure, B: FiniteStructure, A: FiniteStructure) -> tuple[int, list[tuple[int, ...]]]:
    """Vertices ``Emb(A, C)`` and one edge ``f∘Emb(A, B)`` per ``f`` in ``Emb(B, C)``."""
    inst = arrow_instance(C, B, A)
    return len(inst.a_maps), inst.copies


def hypergraph_instance(C: FiniteStructure, B: FiniteStructure, A: FiniteStructure, r: int):
    """The pair ``(G, H)`` as explicit structures with one ``k``-ary symbol,
    where ``k = |Emb(A, B)|`` and ``H`` holds every non-constant ``k``-tuple
    over ``r`` colors.  Only sensible for small ``k``."""
    from itertools import product

    n, edges = hypergraph_edges(C, B, A)
    k = len(embedding_maps(A, B))
    if k == 0:
        sig = [("E0", 1)]
        G = FiniteStructure(sig, n + 1, {"E0": [(n,)] if edges else []})
        return G, FiniteStructure(sig, r, {})
    sig = [("E", k)]
    G = FiniteStructure(sig, n, {"E": edges})
    H = FiniteStructure(sig, r, {"E": [t for t in product(range(r), repeat=k) if len(set(t)) > 1]})
    return G, H


def check_arrow_hypergraph(
    C: FiniteStructure,
    B: FiniteStructure,
    A: FiniteStructure,
    r: int,
    node_budget: int | None = None,
) -> ArrowCertificate:
    """The arrow holds iff the copy hypergraph has no proper ``r``-coloring.

    Uses the constraint solver; ``checked`` is the number of edges.
    """
    if r < 1:
        raise ValueError("r must be positive")
    n, edges = hypergraph_edges(C, B, A)
    col = find_proper_coloring(n, edges, r, node_budget=node_budget)
    if col is None:
        return ArrowCertificate("holds", len(edges), backend="hypergraph")
    return ArrowCertificate("fails", len(edges), Coloring(A, C, r, col), backend="hypergraph")


def verify_arrow(
    C: FiniteStructure,
    B: FiniteStructure,
    A: FiniteStructure,
    r: int,
    budget: int | None = None,
    node_budget: int | None = None,
    jobs: int = 1,
) -> ArrowCertificate:
    """Counter sweep when it fits the budget, constraint solver otherwise."""
    try:
        return check_arrow(C, B, A, r, budget=budget, jobs=jobs)
    except BudgetExceeded:
        return check_arrow_hypergraph(C, B, A, r, node_budget=node_budget or DEFAULT_NODE_BUDGET)


def is_refutation(C: FiniteStructure, B: FiniteStructure, A: FiniteStructure, colors: Mapping[tuple, int] | Callable, k: int = 1) -> bool:
    """Direct evaluation: no copy of ``B`` shows at most ``k`` colors.

    ``colors`` maps each embedding ``A -> C`` (image tuple) to its color.
    """
    color_of = colors if callable(colors) else colors.__getitem__
    ab = embedding_maps(A, B)
    for f in embedding_maps(B, C):
        seen = {color_of(tuple(f[x] for x in g)) for g in ab}
        if len(seen) <= k:
            return False
    return True


def monochromatic_copy(C: FiniteStructure, B: FiniteStructure, A: FiniteStructure, colors: Mapping[tuple, int] | Callable):
    """First ``f`` in ``Emb(B, C)`` on whose copies of ``A`` the coloring is constant."""
    color_of = colors if callable(colors) else colors.__getitem__
    ab = embedding_maps(A, B)
    for f in embedding_maps(B, C):
        if len({color_of(tuple(f[x] for x in g)) for g in ab}) <= 1:
            return f
    return None


def automorphism_coloring(A: FiniteStructure, C: FiniteStructure) -> Coloring:
    """Color ``f`` by the automorphism ``h`` with ``f = f_i ∘ h``, where
    ``f_i`` is the first embedding with the same image as ``f``.

    Uses ``|Aut(A)|`` colors and shows that copies of ``B = A`` cannot be made
    to use fewer.
    """
    auts = automorphisms(A)
    aut_index = {h: i for i, h in enumerate(auts)}
    maps = embedding_maps(A, C)
    rep: dict[frozenset, tuple] = {}
    colors = []
    for f in maps:
        base = rep.setdefault(frozenset(f), f)
        inv = {y: x for x, y in enumerate(base)}
        h = tuple(inv[y] for y in f)
        colors.append(aut_index[h] + 1)
    return Coloring(A, C, len(auts), tuple(colors))


def compose_color_reduction(
    witness_builder: Callable[[FiniteStructure], FiniteStructure],
    B: FiniteStructure,
    r: int,
) -> FiniteStructure:
    """Chain a two-color witness builder into an ``r``-color witness.

    ``witness_builder(X)`` must return some ``C`` with ``C -> (X)^A_2`` for a
    fixed ``A``.  Returns ``C_{r-1}`` where ``C_1 = builder(B)`` and
    ``C_i = builder(C_{i-1})``; for ``r = 1`` that is ``B`` itself.
    """
    if r < 1:
        raise ValueError("r must be positive")
    C = B
    for _ in range(r - 1):
        C = witness_builder(C)
    return C


def order_arrow_witness(
    b: int, a: int, r: int, budget: int | None = None, jobs: int = 1, limit: int = 64
) -> FiniteStructure:
    """Smallest ``p`` with ``([p],<) -> ([b],<)^([a],<)_r``, as a structure."""
    if a > b:
        raise ValueError("pattern larger than target")
    B, A = linear_order(b), linear_order(a)
    if a == 1:
        # pigeonhole; still confirmed by the sweep when affordable
        p = r * (b - 1) + 1
        C = linear_order(p)
        if r ** max(0, p - 1) <= (budget or default_budget()):
            if not check_arrow(C, B, A, r, budget=budget, jobs=jobs).holds:
                raise AssertionError("pigeonhole witness failed verification")
        return C
    for p in range(b, limit + 1):
        C = linear_order(p)
        if check_arrow(C, B, A, r, budget=budget, jobs=jobs).holds:
            return C
    raise BudgetExceeded(f"no witness with at most {limit} points", None, limit)


def smallest_witness(
    candidates: Sequence[FiniteStructure],
    B: FiniteStructure,
    A: FiniteStructure,
    r: int,
    budget: int | None = None,
    jobs: int = 1,
) -> FiniteStructure | None:
    """First candidate ``C`` (in the given order) with ``C -> (B)^A_r``."""
    for C in candidates:
        if not embedding_maps(B, C, limit=1):
            continue
        if check_arrow(C, B, A, r, budget=budget, jobs=jobs).holds:
            return C
    return None
