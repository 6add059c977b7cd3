"""Exhaustive instance generators shared by the partite tests."""

from itertools import combinations, product

from structramsey.core import complete_graph, graph, in_forb
from structramsey.partite import PartiteStructure, nr_power, partite_embeddings

K3 = complete_graph(3)


def pgraph(levels, edges, n_levels=None):
    return PartiteStructure(graph(len(levels), edges), levels, n_levels)


def partite_graphs(max_size, max_levels):
    """Every partite graph with cross-level edges, levels listed in order."""
    for n_levels in range(1, max_levels + 1):
        for size in range(n_levels, max_size + 1):
            for cuts in combinations(range(1, size), n_levels - 1):
                bounds = (0, *cuts, size)
                levels = [l for l in range(n_levels) for _ in range(bounds[l], bounds[l + 1])]
                cross = [(i, j) for i, j in combinations(range(size), 2) if levels[i] != levels[j]]
                for bits in product((0, 1), repeat=len(cross)):
                    yield pgraph(levels, [p for p, b in zip(cross, bits) if b], n_levels)


def transversal_patterns(B):
    """Induced transversal substructures of ``B``, one per choice of elements."""
    for pick in product(*(B.members(l) for l in range(B.n_levels))):
        yield B.substructure(pick)[0]


def templated_instances(max_size):
    """Transversal graphs A on 2 or 3 levels with every B of at most
    ``max_size`` elements whose edges all project onto A-edges."""
    for n in (2, 3):
        pairs = list(combinations(range(n), 2))
        for abits in product((0, 1), repeat=len(pairs)):
            ae = [p for p, b in zip(pairs, abits) if b]
            A = pgraph(list(range(n)), ae)
            for sizes in product(range(1, max_size - n + 2), repeat=n):
                if sum(sizes) > max_size:
                    continue
                levels = [l for l in range(n) for _ in range(sizes[l])]
                allowed = [(i, j) for i in range(len(levels)) for j in range(i + 1, len(levels))
                           if (levels[i], levels[j]) in ae]
                for bits in product((0, 1), repeat=len(allowed)):
                    yield A, pgraph(levels, [p for p, b in zip(allowed, bits) if b], n)


def find_triangle_creating():
    """Triangle-free transversal A and B whose square contains a triangle."""
    for ae in ([], [(0, 1)], [(0, 1), (1, 2)]):
        A = pgraph([0, 1, 2], ae)
        for sizes in product((1, 2), repeat=3):
            levels = [l for l in range(3) for _ in range(sizes[l])]
            cross = [(i, j) for i in range(len(levels)) for j in range(i + 1, len(levels)) if levels[i] != levels[j]]
            for bits in product((0, 1), repeat=len(cross)):
                B = pgraph(levels, [p for p, b in zip(cross, bits) if b], 3)
                if not in_forb([K3], B.base) or not partite_embeddings(A, B):
                    continue
                C = nr_power(B, A, 2)
                if not in_forb([K3], C.base):
                    return A, B, C
    return None
