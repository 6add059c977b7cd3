"""Brute-force reference implementations used to cross-check the library.

Nothing here shares code with the package apart from the structure type.
"""

from __future__ import annotations

from itertools import combinations, permutations, product

from structramsey.core import FiniteStructure


def embeddings(A: FiniteStructure, B: FiniteStructure) -> list[tuple[int, ...]]:
    """Injective maps preserving and reflecting every relation, lex order."""
    out = []
    for m in permutations(range(B.size), A.size):
        ok = True
        for name, k in A.signature:
            RA, RB = A[name], B[name]
            for t in product(range(A.size), repeat=k):
                if (t in RA) != (tuple(m[x] for x in t) in RB):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(m)
    return out


def homomorphisms(A: FiniteStructure, B: FiniteStructure) -> list[tuple[int, ...]]:
    out = []
    for m in product(range(B.size), repeat=A.size):
        if all(tuple(m[x] for x in t) in B[name] for name, _ in A.signature for t in A[name]):
            out.append(m)
    return out


def arrow(C: FiniteStructure, B: FiniteStructure, A: FiniteStructure, r: int, k: int = 1) -> bool:
    """Every coloring, no symmetry breaking."""
    ac = embeddings(A, C)
    index = {g: i for i, g in enumerate(ac)}
    ab = embeddings(A, B)
    copies = [[index[tuple(f[x] for x in g)] for g in ab] for f in embeddings(B, C)]
    for col in product(range(r), repeat=len(ac)):
        if not any(len({col[i] for i in cp}) <= k for cp in copies):
            return False
    return True


def hj_lines(m: int, d: int) -> set[frozenset]:
    """Lines as point sets: a nonempty set of moving coordinates plus fixed values."""
    lines = set()
    for moving in range(1, 2 ** d):
        fixed_coords = [i for i in range(d) if not moving >> i & 1]
        for vals in product(range(1, m + 1), repeat=len(fixed_coords)):
            base = dict(zip(fixed_coords, vals))
            lines.add(frozenset(tuple(base.get(i, a) for i in range(d)) for a in range(1, m + 1)))
    return lines


def hj_holds(m: int, r: int, d: int) -> bool:
    pts = list(product(range(1, m + 1), repeat=d))
    lines = hj_lines(m, d)
    for col in product(range(r), repeat=len(pts)):
        c = dict(zip(pts, col))
        if not any(len({c[p] for p in L}) == 1 for L in lines):
            return False
    return True


def tree_c_relation(T) -> set[tuple[int, int, int]]:
    """C(a; b, c) iff the last common ancestor of b and c lies strictly below
    that of a and b, computed from root-to-leaf paths."""
    paths: dict[int, tuple] = {}

    def walk(t, path):
        if isinstance(t, int):
            paths[t] = path
        else:
            walk(t[0], path + (0,))
            walk(t[1], path + (1,))

    walk(T, ())

    def lca_depth(x, y):
        n = 0
        for p, q in zip(paths[x], paths[y]):
            if p != q:
                break
            n += 1
        return n

    L = sorted(paths)
    return {
        (a, b, c)
        for a in L
        for b in L
        for c in L
        if b != c and a != b and a != c and lca_depth(b, c) > lca_depth(a, b)
    } | {(a, b, b) for a in L for b in L if a != b}


def amalgamates(members, A, B1, B2, e1, e2) -> bool:
    """Some member D with embeddings of B1, B2 agreeing on A."""
    for D in members:
        for f1 in embeddings(B1, D):
            for f2 in embeddings(B2, D):
                if all(f1[e1[x]] == f2[e2[x]] for x in range(A.size)):
                    return True
    return False


def subsets(n: int, k: int):
    return list(combinations(range(n), k))
