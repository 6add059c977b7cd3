"""Binary trees as ordered C-relations, and Ramsey witnesses for them.

A tree is either a leaf (an ``int`` label) or a pair ``(left, right)``.  As a
structure over ``C`` (ternary) and ``<`` its domain is the set of leaf
labels, ``C(a; b, c)`` holds when ``a`` lies outside the smallest subtree
containing ``b`` and ``c``, and ``<`` is the order of the labels.  A tree is
*convex* when its labels read ``0, 1, ..., n-1`` from left to right.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Mapping, Sequence, Union

from .arrow import ArrowCertificate, verify_arrow
from .core import FiniteStructure, Signature, embedding_maps, is_linear_order
from .errors import BudgetExceeded, InvariantError, RepresentationError
from .search import find_proper_coloring, sweep

Tree = Union[int, tuple]

C_SIG = Signature([("C", 3), ("<", 2)])


# ---------------------------------------------------------------------------
# tree basics


def is_leaf(T: Tree) -> bool:
    return isinstance(T, int)


def leaves(T: Tree) -> list[int]:
    if is_leaf(T):
        return [T]
    return leaves(T[0]) + leaves(T[1])


def n_leaves(T: Tree) -> int:
    return 1 if is_leaf(T) else n_leaves(T[0]) + n_leaves(T[1])


def height(T: Tree) -> int:
    return 0 if is_leaf(T) else 1 + max(height(T[0]), height(T[1]))


def parse_tree(data) -> Tree:
    """Nested JSON arrays (pairs) with integer leaves."""
    if isinstance(data, bool):
        raise RepresentationError("leaves must be integers")
    if isinstance(data, int):
        return data
    if isinstance(data, (list, tuple)) and len(data) == 2:
        return (parse_tree(data[0]), parse_tree(data[1]))
    raise RepresentationError(f"not a binary tree: {data!r}")


def tree_to_json(T: Tree):
    return T if is_leaf(T) else [tree_to_json(T[0]), tree_to_json(T[1])]


def relabel_convex(T: Tree, start: int = 0) -> Tree:
    """Same shape with labels ``start, start+1, ...`` from left to right."""
    counter = iter(range(start, start + n_leaves(T)))

    def go(t):
        return next(counter) if is_leaf(t) else (go(t[0]), go(t[1]))

    return go(T)


def join(left: Tree, right: Tree) -> Tree:
    """Convex tree whose root has the given subtrees."""
    return relabel_convex((relabel_convex(left), relabel_convex(right)))


def comb(n: int) -> Tree:
    """Left comb with ``n`` leaves."""
    T: Tree = 0
    for i in range(1, n):
        T = (T, i)
    return T


def complete_tree(h: int) -> Tree:
    T: Tree = 0
    for _ in range(h):
        T = (T, T)
    return relabel_convex(T)


def tree_shapes(n: int) -> list[Tree]:
    """Every convex tree with ``n`` leaves (Catalan many)."""
    if n < 1:
        return []

    def shapes(k):
        if k == 1:
            return [0]
        return [(l, r) for i in range(1, k) for l in shapes(i) for r in shapes(k - i)]

    return [relabel_convex(t) for t in shapes(n)]


def labelled_trees(n: int) -> list[Tree]:
    """Every tree on leaf labels ``0..n-1`` up to swapping children; the
    child holding the smaller minimum label is put on the left."""
    if n < 1:
        return []
    trees: list[Tree] = [0]
    for x in range(1, n):
        nxt = []
        for T in trees:
            nxt.extend(_insert_everywhere(T, x))
        trees = nxt
    return [_normalize(T) for T in trees]


def _insert_everywhere(T: Tree, x: int) -> list[Tree]:
    out = [(T, x)]
    if not is_leaf(T):
        out += [(l, T[1]) for l in _insert_everywhere(T[0], x)]
        out += [(T[0], r) for r in _insert_everywhere(T[1], x)]
    return out


def _normalize(T: Tree) -> Tree:
    if is_leaf(T):
        return T
    l, r = _normalize(T[0]), _normalize(T[1])
    return (l, r) if min(leaves(l)) < min(leaves(r)) else (r, l)


# ---------------------------------------------------------------------------
# C-relations


def tree_to_structure(T: Tree) -> FiniteStructure:
    labels = leaves(T)
    n = len(labels)
    if sorted(labels) != list(range(n)):
        raise RepresentationError("leaf labels must be 0..n-1, each once")
    rel = set()

    def clades(t):
        if is_leaf(t):
            s = [t]
        else:
            s = clades(t[0]) + clades(t[1])
        inside = set(s)
        outside = [a for a in range(n) if a not in inside]
        for b in s:
            for c in s:
                for a in outside:
                    rel.add((a, b, c))
        return s

    clades(T)
    return FiniteStructure(C_SIG, n, {"C": rel, "<": [(i, j) for i in range(n) for j in range(i + 1, n)]})


def c_axiom_violation(S: FiniteStructure, symbol: str = "C") -> str | None:
    """Name of the first violated axiom (with a witness), or None."""
    R = S[symbol]
    n = S.size
    for a, b, c in R:
        if (a, c, b) not in R:
            return f"C1 at {(a, b, c)}"
        if (b, a, c) in R:
            return f"C2 at {(a, b, c)}"
        for d in range(n):
            if (a, d, c) not in R and (d, b, c) not in R:
                return f"C3 at {(a, b, c)} with d={d}"
    for a in range(n):
        for b in range(n):
            if a != b and (a, b, b) not in R:
                return f"C4 at {(a, b)}"
    return None


def check_c_axioms(S: FiniteStructure, symbol: str = "C") -> bool:
    return c_axiom_violation(S, symbol) is None


def is_binary_branching(S: FiniteStructure, symbol: str = "C") -> bool:
    R = S[symbol]
    n = S.size
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                if (a, b, c) not in R and (b, a, c) not in R and (c, a, b) not in R:
                    return False
    return True


def is_convex(S: FiniteStructure, order: str = "<", symbol: str = "C") -> bool:
    """If ``C(u; v, w)`` and ``v < w`` then ``u`` is not between them."""
    lt = S[order]
    for u, v, w in S[symbol]:
        if v != w and (v, w) in lt and (v, u) in lt and (u, w) in lt:
            return False
    return True


def is_ordered_ctree(S: FiniteStructure) -> bool:
    return (
        S.signature == C_SIG
        and check_c_axioms(S)
        and is_binary_branching(S)
        and is_linear_order(S, "<")
    )


def is_convex_ctree(S: FiniteStructure) -> bool:
    return is_ordered_ctree(S) and is_convex(S)


def structure_to_tree(S: FiniteStructure) -> Tree:
    """Recover the tree of a binary branching C-relation.

    Children are ordered by their ``<``-least leaf, so a convex structure
    comes back with labels in left-to-right order.
    """
    if S.size == 0:
        raise RepresentationError("empty structure has no tree")
    violation = c_axiom_violation(S)
    if violation:
        raise RepresentationError(f"not a C-relation: {violation}")
    if not is_binary_branching(S):
        raise RepresentationError("C-relation is not binary branching")
    R = S["C"]
    if "<" in S.signature and is_linear_order(S, "<"):
        lt = S["<"]
        rank = {x: sum((y, x) in lt for y in range(S.size)) for x in range(S.size)}
    else:
        rank = {x: x for x in range(S.size)}

    def build(block: list[int]) -> Tree:
        if len(block) == 1:
            return block[0]
        # x, y share a side of the root split iff some z in the block is cut off from both
        parent = {x: x for x in block}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x in block:
            for y in block:
                if x < y and any((z, x, y) in R for z in block):
                    parent[find(x)] = find(y)
        parts: dict[int, list[int]] = {}
        for x in block:
            parts.setdefault(find(x), []).append(x)
        if len(parts) != 2:
            raise RepresentationError("C-relation does not split into two parts")
        p, q = sorted(parts.values(), key=lambda s: min(rank[x] for x in s))
        return (build(p), build(q))

    return build(list(range(S.size)))


# ---------------------------------------------------------------------------
# split embeddings


def subtrees(T: Tree) -> tuple[Tree, Tree]:
    """Left and right subtree of a convex tree, each relabelled from 0."""
    if is_leaf(T):
        raise RepresentationError("a leaf has no subtrees")
    return relabel_convex(T[0]), relabel_convex(T[1])


def tree_embeddings(A: Tree, T: Tree) -> list[tuple[int, ...]]:
    return embedding_maps(tree_to_structure(A), tree_to_structure(T))


def combine(e1: Sequence[int], e2: Sequence[int], offset: int) -> tuple[int, ...]:
    """``<e1, e2>``: left part by ``e1``, right part by ``e2`` shifted past the
    left subtree of the host."""
    return tuple(e1) + tuple(x + offset for x in e2)


def split_embeddings(A: Tree, T: Tree) -> list[tuple[tuple, tuple, tuple]]:
    """Triples ``(e1, e2, <e1, e2>)`` over all ``e1: A_left -> T_left`` and
    ``e2: A_right -> T_right``; these are exactly the embeddings of ``A``
    into ``T`` that separate the two sides of ``A`` at the root of ``T``."""
    Al, Ar = subtrees(A)
    Tl, Tr = subtrees(T)
    off = n_leaves(Tl)
    return [(e1, e2, combine(e1, e2, off)) for e1 in tree_embeddings(Al, Tl) for e2 in tree_embeddings(Ar, Tr)]


def root_splitting(e: Sequence[int], A: Tree, T: Tree) -> bool:
    ka = n_leaves(subtrees(A)[0])
    kt = n_leaves(subtrees(T)[0])
    return all(x < kt for x in e[:ka]) and all(x >= kt for x in e[ka:])


# ---------------------------------------------------------------------------
# the inductive construction


@dataclass
class SplitWitness:
    tree: Tree
    left: Tree
    right: Tree
    s: int  # colors needed on the left


@dataclass
class TreeRamseyResult:
    tree: Tree
    verified: bool  # arrow checked on the final tree (or witness correct by construction)
    method: str
    chain: list = field(default_factory=list)  # C_1, C_2, ... for the inductive case
    certificate: ArrowCertificate | None = None

    @property
    def size(self) -> int:
        return n_leaves(self.tree)


def _base_case(B: Tree, r: int) -> Tree:
    """Host for a single-leaf pattern: two leaves of one color always form a
    cherry, and a complete tree of height ``r*h`` has a color class that
    contains a complete tree of height ``h``."""
    k = n_leaves(B)
    if k == 1:
        return 0
    if k == 2:
        return comb(r + 1)
    return complete_tree(r * height(B))


def construct_split_witness(A: Tree, D: Tree, r: int, **kw) -> SplitWitness:
    """Tree ``F`` whose split embeddings of ``A`` force, for every
    ``r``-coloring, copies of ``D`` on both sides with every combination
    monochromatic."""
    Al, Ar = subtrees(A)
    right = construct_ramsey_tree(Ar, D, r, **kw).tree
    s = r ** len(tree_embeddings(Ar, right))
    left = construct_ramsey_tree(Al, D, s, **kw).tree
    return SplitWitness(join(left, right), relabel_convex(left), relabel_convex(right), s)


def split_claim_instance(A: Tree, D: Tree, F: Tree) -> tuple[list[tuple], list[tuple[int, ...]]]:
    """Vertices (split embeddings of ``A`` into ``F``) and one edge per pair
    of copies of ``D`` on the two sides."""
    Al, Ar = subtrees(A)
    Fl, Fr = subtrees(F)
    off = n_leaves(Fl)
    verts = [combine(e1, e2, off) for e1 in tree_embeddings(Al, Fl) for e2 in tree_embeddings(Ar, Fr)]
    index = {v: i for i, v in enumerate(verts)}
    l_in_d, r_in_d = tree_embeddings(Al, D), tree_embeddings(Ar, D)
    edges = []
    for f1 in tree_embeddings(D, Fl):
        for f2 in tree_embeddings(D, Fr):
            edges.append(tuple(
                index[combine([f1[x] for x in e1], [f2[x] for x in e2], off)] for e1 in l_in_d for e2 in r_in_d
            ))
    return verts, edges


def verify_split_claim(A: Tree, D: Tree, F: Tree, r: int, budget: int | None = None, node_budget: int | None = None) -> bool:
    """Every ``r``-coloring of the split embeddings is constant on some edge
    of :func:`split_claim_instance`.  Sweeps when affordable."""
    verts, edges = split_claim_instance(A, D, F)
    try:
        res = sweep(len(verts), r, [(e,) for e in edges], fixed=(0,) if verts and r > 1 else (), budget=budget)
        return res.holds
    except BudgetExceeded:
        return find_proper_coloring(len(verts), edges, r, node_budget=node_budget) is None


def construct_ramsey_tree(
    A: Tree,
    B: Tree,
    r: int,
    verify: bool = True,
    budget: int | None = None,
    node_budget: int | None = None,
    max_leaves: int = 4096,
) -> TreeRamseyResult:
    """Convex tree ``C`` with ``C -> (B)^A_r``.

    For a single-leaf pattern a direct pigeonhole witness is returned.
    Otherwise ``C_1`` is one leaf and ``C_{i+1}`` is the split witness over
    ``C_i``; the first ``C_i`` passing the arrow check is returned.  If the
    check runs out of budget the chain is followed up to ``(h+1)^r`` steps,
    ``h`` the height of ``B``, and the result is marked unverified.
    """
    A, B = relabel_convex(A), relabel_convex(B)
    if r < 1:
        raise ValueError("r must be positive")
    if n_leaves(A) == 1:
        return TreeRamseyResult(_base_case(B, r), True, "pigeonhole")
    SA, SB = tree_to_structure(A), tree_to_structure(B)
    copies = len(embedding_maps(SA, SB, limit=2))
    if r == 1 or copies <= 1:
        return TreeRamseyResult(B, True, "trivial")
    n_max = (height(B) + 1) ** r
    chain: list[Tree] = [0]
    can_verify = verify
    for _ in range(2, n_max + 1):
        prev = chain[-1]
        C = construct_split_witness(A, prev, r, verify=verify, budget=budget, node_budget=node_budget, max_leaves=max_leaves).tree
        if n_leaves(C) > max_leaves:
            raise BudgetExceeded(f"chain reached {n_leaves(C)} leaves (limit {max_leaves})", n_leaves(C), max_leaves)
        chain.append(C)
        if can_verify:
            try:
                cert = verify_arrow(tree_to_structure(C), SB, SA, r, budget=budget, node_budget=node_budget)
            except BudgetExceeded:
                can_verify = False
                continue
            if cert.holds:
                return TreeRamseyResult(C, True, "chain", chain, cert)
    return TreeRamseyResult(chain[-1], False, "chain", chain)


# ---------------------------------------------------------------------------
# replay of the word-indexed argument


@dataclass
class ReplayResult:
    embedding: tuple[int, ...]  # B -> C_n
    color: int
    colors: dict  # word -> color of the split at that word


def _mono_copy(
    host_maps: list[tuple], pattern_maps: list[tuple], value: Callable[[tuple], object]
) -> tuple[tuple, object] | None:
    for f in host_maps:
        vals = {value(tuple(f[x] for x in e)) for e in pattern_maps}
        if len(vals) <= 1:
            return f, (vals.pop() if vals else None)
    return None


def replay_chain(A: Tree, B: Tree, chain: Sequence[Tree], coloring: Mapping[tuple, int] | Callable) -> ReplayResult | None:
    """Follow the inductive argument on ``chain = [C_1, ..., C_n]`` for a
    concrete coloring of ``Emb(A, C_n)``.

    For each binary word ``w`` of length ``i < n-1`` an embedding
    ``g_w: C_{n-i} -> C_n`` and a color ``c_w`` are computed; then a copy of
    ``B`` is sought whose branchings all sit at words of one color.  Returns
    None when this chain is too short to guarantee one.
    """
    color = coloring if callable(coloring) else coloring.__getitem__
    A, B = relabel_convex(A), relabel_convex(B)
    n = len(chain)
    Al, Ar = subtrees(A)
    g: dict[str, tuple[int, ...]] = {"": tuple(range(n_leaves(chain[-1])))}
    c: dict[str, int] = {}
    for depth in range(n - 1):
        F = chain[n - 1 - depth]
        D = chain[n - 2 - depth]
        Fl, Fr = subtrees(F)
        off = n_leaves(Fl)
        e2s = tree_embeddings(Ar, Fr)
        la, ra = tree_embeddings(Al, D), tree_embeddings(Ar, D)
        d_left, d_right = tree_embeddings(D, Fl), tree_embeddings(D, Fr)
        for w in ["".join(p) for p in product("12", repeat=depth)]:
            gw = g[w]

            def psi(e1, e2, gw=gw):
                return color(tuple(gw[x] for x in combine(e1, e2, off)))

            found = _mono_copy(d_left, la, lambda e1: tuple(psi(e1, e2) for e2 in e2s))
            if found is None:
                raise InvariantError(f"no left copy at word {w!r}")
            f1, profile = found
            if profile is None:
                # D holds no copy of the left part, so nothing splits here
                f2, cw = d_right[0], None
            else:
                phi = dict(zip(e2s, profile))
                found = _mono_copy(d_right, ra, phi.__getitem__)
                if found is None:
                    raise InvariantError(f"no right copy at word {w!r}")
                f2, cw = found
            c[w] = cw
            g[w + "1"] = tuple(gw[f1[x]] for x in range(n_leaves(D)))
            g[w + "2"] = tuple(gw[off + f2[x]] for x in range(n_leaves(D)))

    def place(t: Tree, prefix: str, col: int):
        """Words for the leaves of ``t`` (left to right), or None."""
        if is_leaf(t):
            return [prefix + "1" * (n - 1 - len(prefix))]
        for extra in range(0, n - 1 - len(prefix)):
            for tail in product("12", repeat=extra):
                u = prefix + "".join(tail)
                if c[u] is not None and c[u] != col:
                    continue
                left = place(t[0], u + "1", col)
                if left is None:
                    continue
                right = place(t[1], u + "2", col)
                if right is not None:
                    return left + right
        return None

    SB, SA = tree_to_structure(B), tree_to_structure(A)
    SC = tree_to_structure(chain[-1])
    ab = embedding_maps(SA, SB)
    for col in sorted({v for v in c.values() if v is not None}) or [1]:
        words = place(B, "", col)
        if words is None:
            continue
        m = tuple(g[w][0] for w in words)
        if not embedding_maps(SB, SC, allowed=[[y] for y in m]):
            raise InvariantError("replayed map is not an embedding")
        seen = {color(tuple(m[x] for x in e)) for e in ab}
        if seen != {col}:
            raise InvariantError("replayed copy is not monochromatic")
        return ReplayResult(m, col, c)
    return None
