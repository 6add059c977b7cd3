"""Classes of finite structures given by a membership test and an
enumerator of isomorphism types by size."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Callable, Iterable, Iterator, Sequence

from .core import (
    FiniteStructure,
    Signature,
    canonical_form,
    embedding_maps,
    in_forb,
    is_linear_order,
    linear_order,
)
from .errors import ClassError, SignatureError
from . import trees


@dataclass(frozen=True)
class ClassGenerator:
    name: str
    signature: Signature
    contains: Callable[[FiniteStructure], bool]
    generate: Callable[[int], Iterable[FiniteStructure]]  # one structure per isomorphism type of size n

    def __contains__(self, S: FiniteStructure) -> bool:
        return S.signature == self.signature and self.contains(S)

    def of_size(self, n: int) -> list[FiniteStructure]:
        return list(self.generate(n))

    def members(self, n: int) -> list[FiniteStructure]:
        """Isomorphism types of size at most ``n``, smallest first."""
        out = []
        for k in range(n + 1):
            out.extend(self.generate(k))
        return out

    def require(self, S: FiniteStructure) -> None:
        if S not in self:
            raise ClassError(f"structure is not in class {self.name!r}")


def _dedupe(structs: Iterable[FiniteStructure]) -> Iterator[FiniteStructure]:
    seen = set()
    for S in structs:
        k = canonical_form(S)
        if k not in seen:
            seen.add(k)
            yield S


def all_structures(signature: Signature, n: int) -> Iterator[FiniteStructure]:
    """Every labelled structure on ``0..n-1`` (tiny ``n`` only)."""
    slots = [(name, t) for name, k in signature for t in product(range(n), repeat=k)]
    for bits in product((False, True), repeat=len(slots)):
        rels: dict[str, list] = {name: [] for name in signature.names}
        for (name, t), b in zip(slots, bits):
            if b:
                rels[name].append(t)
        yield FiniteStructure(signature, n, rels)


# graphs ---------------------------------------------------------------------

GRAPH_SIG = Signature([("E", 2)])
ORDERED_GRAPH_SIG = Signature([("E", 2), ("<", 2)])


def is_graph(S: FiniteStructure, symbol: str = "E") -> bool:
    R = S[symbol]
    return all(x != y and (y, x) in R for x, y in R)


def _edge_sets(n: int) -> Iterator[list[tuple[int, int]]]:
    pairs = list(combinations(range(n), 2))
    for bits in product((False, True), repeat=len(pairs)):
        yield [p for p, b in zip(pairs, bits) if b]


def _sym(edges):
    return [(u, v) for u, v in edges] + [(v, u) for u, v in edges]


def has_clique(S: FiniteStructure, k: int, symbol: str = "E") -> bool:
    R = S[symbol]
    return any(all((x, y) in R for x, y in combinations(c, 2)) for c in combinations(range(S.size), k))


def is_forest(S: FiniteStructure, symbol: str = "E") -> bool:
    if not is_graph(S, symbol):
        return False
    parent = list(range(S.size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x, y in S[symbol]:
        if x < y:
            a, b = find(x), find(y)
            if a == b:
                return False
            parent[a] = b
    return True


def graphs() -> ClassGenerator:
    def gen(n):
        return _dedupe(FiniteStructure(GRAPH_SIG, n, {"E": _sym(es)}) for es in _edge_sets(n))

    return ClassGenerator("graphs", GRAPH_SIG, is_graph, gen)


def forests() -> ClassGenerator:
    def gen(n):
        for S in graphs().generate(n):
            if is_forest(S):
                yield S

    return ClassGenerator("forests", GRAPH_SIG, is_forest, gen)


def ordered_graphs(forbid_clique: int | None = None) -> ClassGenerator:
    """Graphs with a linear order; optionally without ``K_k``."""

    def ok(S):
        return is_graph(S) and is_linear_order(S, "<") and not (forbid_clique and has_clique(S, forbid_clique))

    def gen(n):
        lt = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for es in _edge_sets(n):
            S = FiniteStructure(ORDERED_GRAPH_SIG, n, {"E": _sym(es), "<": lt})
            if not forbid_clique or not has_clique(S, forbid_clique):
                yield S

    name = "ordered-graphs" if not forbid_clique else f"ordered-K{forbid_clique}-free-graphs"
    return ClassGenerator(name, ORDERED_GRAPH_SIG, ok, gen)


# orders and ordered structures ------------------------------------------------


def linear_orders(symbol: str = "<") -> ClassGenerator:
    sig = Signature([(symbol, 2)])

    def gen(n):
        yield linear_order(n, symbol)

    return ClassGenerator("lo", sig, lambda S: is_linear_order(S, symbol), gen)


def ordered_structures(signature: Signature | Iterable[tuple[str, int]], order: str = "<") -> ClassGenerator:
    """All structures over ``signature`` with an added linear order."""
    tau = signature if isinstance(signature, Signature) else Signature(signature)
    if order in tau:
        raise SignatureError(f"{order!r} is already used")
    sig = tau.extend([(order, 2)])

    def gen(n):
        lt = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for S in all_structures(tau, n):
            yield FiniteStructure(sig, n, {**S.relations, order: lt})

    return ClassGenerator(f"ordered{list(tau.symbols)}", sig, lambda S: is_linear_order(S, order), gen)


def two_orders() -> ClassGenerator:
    sig = Signature([("<1", 2), ("<2", 2)])

    def gen(n):
        lt = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for perm in permutations(range(n)):
            yield FiniteStructure(sig, n, {"<1": lt, "<2": [(perm[i], perm[j]) for i in range(n) for j in range(i + 1, n)]})

    return ClassGenerator("two-orders", sig, lambda S: is_linear_order(S, "<1") and is_linear_order(S, "<2"), gen)


# equivalence relations with orders --------------------------------------------

EQ_SIG = Signature([("E", 2), ("<", 2)])


def is_equivalence(S: FiniteStructure, symbol: str = "E") -> bool:
    R = S[symbol]
    n = S.size
    if any((x, x) not in R for x in range(n)):
        return False
    if any((y, x) not in R for x, y in R):
        return False
    return all((x, z) in R for x, y in R for z in range(n) if (y, z) in R)


def set_partitions(n: int) -> Iterator[list[int]]:
    """Restricted growth strings: block index of each element."""
    if n == 0:
        yield []
        return

    def rec(prefix, top):
        if len(prefix) == n:
            yield list(prefix)
            return
        for b in range(top + 2):
            prefix.append(b)
            yield from rec(prefix, max(top, b))
            prefix.pop()

    yield from rec([0], 0)


def equivalence_structure(blocks: Sequence[int]) -> FiniteStructure:
    n = len(blocks)
    E = [(x, y) for x in range(n) for y in range(n) if blocks[x] == blocks[y]]
    return FiniteStructure(EQ_SIG, n, {"E": E, "<": [(i, j) for i in range(n) for j in range(i + 1, n)]})


def equivalence_orders() -> ClassGenerator:
    def gen(n):
        for blocks in set_partitions(n):
            yield equivalence_structure(blocks)

    return ClassGenerator("equivalence-order", EQ_SIG, lambda S: is_equivalence(S) and is_linear_order(S, "<"), gen)


def convex_equivalence_orders() -> ClassGenerator:
    """Equivalence classes that are intervals of the order."""

    def convex(S):
        E = S["E"]
        lt = S["<"]
        return all(not ((x, y) in lt and (y, z) in lt and (y, x) not in E) for x, z in E for y in range(S.size) if (x, z) in lt)

    def gen(n):
        for blocks in set_partitions(n):
            if blocks == sorted(blocks):
                yield equivalence_structure(blocks)

    return ClassGenerator(
        "convex-equivalence-order", EQ_SIG,
        lambda S: is_equivalence(S) and is_linear_order(S, "<") and convex(S), gen,
    )


# C-relations ------------------------------------------------------------------


def convex_ctrees() -> ClassGenerator:
    def gen(n):
        for T in trees.tree_shapes(n):
            yield trees.tree_to_structure(T)
        if n == 0:
            yield FiniteStructure(trees.C_SIG, 0)

    return ClassGenerator("convex-ctrees", trees.C_SIG, trees.is_convex_ctree, gen)


def ordered_ctrees() -> ClassGenerator:
    """Binary branching C-relations with an arbitrary linear order."""

    def gen(n):
        for T in trees.labelled_trees(n):
            yield trees.tree_to_structure(T)
        if n == 0:
            yield FiniteStructure(trees.C_SIG, 0)

    return ClassGenerator("ordered-ctrees", trees.C_SIG, trees.is_ordered_ctree, gen)


# forbidden substructures ------------------------------------------------------


def forb_class(forbidden: Sequence[FiniteStructure], name: str = "forb") -> ClassGenerator:
    """Structures admitting no homomorphism from any listed structure."""
    if not forbidden:
        raise ClassError("need at least one forbidden structure")
    sig = forbidden[0].signature
    if any(F.signature != sig for F in forbidden):
        raise SignatureError("forbidden structures must share a signature")

    def gen(n):
        return _dedupe(S for S in all_structures(sig, n) if in_forb(forbidden, S))

    return ClassGenerator(name, sig, lambda S: in_forb(forbidden, S), gen)


def forb_embedding_class(forbidden: Sequence[FiniteStructure], name: str = "forb-emb") -> ClassGenerator:
    """Structures with no embedded copy of any listed structure."""
    sig = forbidden[0].signature

    def ok(S):
        return not any(embedding_maps(F, S, limit=1) for F in forbidden)

    def gen(n):
        return _dedupe(S for S in all_structures(sig, n) if ok(S))

    return ClassGenerator(name, sig, ok, gen)


BUILTIN = {
    "lo": linear_orders,
    "ordered-graphs": ordered_graphs,
    "ordered-triangle-free-graphs": lambda: ordered_graphs(3),
    "graphs": graphs,
    "forests": forests,
    "equivalence-order": equivalence_orders,
    "convex-equivalence-order": convex_equivalence_orders,
    "convex-ctrees": convex_ctrees,
    "ordered-ctrees": ordered_ctrees,
    "two-orders": two_orders,
}


def builtin_class(name: str) -> ClassGenerator:
    if name.startswith("ordered-K") and name.endswith("-free-graphs"):
        return ordered_graphs(int(name[len("ordered-K"):-len("-free-graphs")]))
    try:
        return BUILTIN[name]()
    except KeyError:
        raise ClassError(f"unknown class {name!r}; known: {sorted(BUILTIN)}") from None
