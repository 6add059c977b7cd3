"""Ordering property checks and colorings that defeat Ramsey-ness when only
some orders are convex."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from .arrow import Coloring
from .classes import ClassGenerator, equivalence_orders, graphs, linear_orders, ordered_graphs, two_orders
from .core import FiniteStructure, canonical_form, embedding_maps
from .errors import BudgetExceeded, ClassError, SignatureError
from . import trees


@dataclass(frozen=True)
class OrderExpansionFamily:
    """``expanded`` adds the linear order ``order`` to the structures of ``base``."""

    base: ClassGenerator
    expanded: ClassGenerator
    order: str

    def reduct(self, S: FiniteStructure) -> FiniteStructure:
        return S.reduct(self.base.signature.names)

    def expansions(self, X: FiniteStructure) -> list[FiniteStructure]:
        """Isomorphism types of expansions of ``X`` lying in the expanded class."""
        if X.signature != self.base.signature:
            raise SignatureError("structure is not over the base signature")
        out, seen = [], set()
        for perm in permutations(range(X.size)):
            rank = {x: i for i, x in enumerate(perm)}
            lt = [(x, y) for x in range(X.size) for y in range(X.size) if rank[x] < rank[y]]
            S = X.expand([(self.order, 2)], {self.order: lt}).with_signature(self.expanded.signature)
            if S in self.expanded:
                k = canonical_form(S)
                if k not in seen:
                    seen.add(k)
                    out.append(S)
        return out


def family(name: str) -> OrderExpansionFamily:
    if name == "two-orders":
        # reducts keep <1; the expansions add <2
        return OrderExpansionFamily(linear_orders("<1"), two_orders(), "<2")
    if name == "ordered-graphs":
        return OrderExpansionFamily(graphs(), ordered_graphs(), "<")
    if name == "lo":
        from .core import Signature

        empty = ClassGenerator("sets", Signature([]), lambda S: True, lambda n: [FiniteStructure(Signature([]), n)])
        return OrderExpansionFamily(empty, linear_orders(), "<")
    raise ClassError(f"no order expansion family named {name!r}")


@dataclass
class OrderingPropertyResult:
    witness: FiniteStructure | None
    # for every rejected candidate Y: (expansion of X, expansion of Y) with no embedding
    blocking: list[tuple[FiniteStructure, FiniteStructure, FiniteStructure]] = field(default_factory=list)
    checked: int = 0


def check_ordering_property(
    F: OrderExpansionFamily, X: FiniteStructure, max_size: int, budget: int | None = None
) -> OrderingPropertyResult:
    """Smallest ``Y`` of the base class, up to ``max_size`` elements, such
    that every admissible expansion of ``X`` embeds into every admissible
    expansion of ``Y``.

    ``X`` may be given over either signature; an expanded ``X`` is reduced
    first.  ``budget`` caps the number of embedding tests.
    """
    if X.signature == F.expanded.signature:
        X = F.reduct(X)
    F.base.require(X)
    xs = F.expansions(X)
    result = OrderingPropertyResult(None)
    tests = 0
    for Y in F.base.members(max_size):
        result.checked += 1
        blocked = None
        for Yx in F.expansions(Y):
            for Xx in xs:
                tests += 1
                if budget is not None and tests > budget:
                    raise BudgetExceeded("ordering property search exceeded its budget", budget=budget)
                if not embedding_maps(Xx, Yx, limit=1):
                    blocked = (Y, Xx, Yx)
                    break
            if blocked:
                break
        if blocked is None and xs:
            result.witness = Y
            return result
        if blocked is not None:
            result.blocking.append(blocked)
    return result


def _color_by(order_rank: dict[int, int], maps: list[tuple[int, ...]]) -> tuple[int, ...]:
    return tuple(1 if order_rank[g[0]] < order_rank[g[1]] else 2 for g in maps)


EQ_PATTERN = FiniteStructure(equivalence_orders().signature, 2, {"E": [(0, 0), (1, 1)], "<": [(0, 1)]})
# four points b < c < a < d, classes {a, b} and {c, d}
EQ_TARGET = FiniteStructure(
    equivalence_orders().signature,
    4,
    {"E": [(x, y) for x in range(4) for y in range(4) if x % 2 == y % 2], "<": [(i, j) for i in range(4) for j in range(i + 1, 4)]},
)
CTREE_PATTERN = trees.tree_to_structure((0, 1))
# four leaves a < c < b < d with cherries {a, b} and {c, d}
CTREE_TARGET = trees.tree_to_structure(((0, 2), (1, 3)))


def convex_order_equivalence(C: FiniteStructure) -> list[int]:
    """Rank of each element in the order that lists classes by their least
    element and keeps ``<`` inside a class."""
    lt = C["<"]
    E = C["E"]
    rank_lt = {x: sum((y, x) in lt for y in range(C.size)) for x in range(C.size)}
    lead = {x: min((y for y in range(C.size) if (x, y) in E), key=rank_lt.get) for x in range(C.size)}
    order = sorted(range(C.size), key=lambda x: (rank_lt[lead[x]], rank_lt[x]))
    return [order.index(x) for x in range(C.size)]


def convex_defeat_equivalence(C: FiniteStructure) -> Coloring:
    """Color each copy ``u < v`` of two inequivalent points by whether a
    convex order agrees with ``<`` on it."""
    if C not in equivalence_orders():
        raise ClassError("expected an equivalence relation with a linear order")
    rank = convex_order_equivalence(C)
    maps = embedding_maps(EQ_PATTERN, C)
    return Coloring(EQ_PATTERN, C, 2, _color_by(dict(enumerate(rank)), maps))


def convex_order_ctree(C: FiniteStructure) -> list[int]:
    """Left-to-right leaf rank in the tree of ``C``, children ordered by
    their ``<``-least leaf."""
    if C.size == 0:
        return []
    T = trees.structure_to_tree(C)
    return [trees.leaves(T).index(x) for x in range(C.size)]


def convex_defeat_ctree(C: FiniteStructure) -> Coloring:
    if not trees.is_ordered_ctree(C):
        raise ClassError("expected a binary branching C-relation with a linear order")
    rank = convex_order_ctree(C)
    maps = embedding_maps(CTREE_PATTERN, C)
    return Coloring(CTREE_PATTERN, C, 2, _color_by(dict(enumerate(rank)), maps))
