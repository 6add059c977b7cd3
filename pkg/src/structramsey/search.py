"""Exhaustive coloring searches shared by the arrow and Hales-Jewett code.

Two independent engines live here.

``sweep`` walks every coloring in counter order (the first variable is the
most significant digit) and returns the lexicographically first coloring in
which no *target* is satisfied.  A target is a tuple of groups of variables;
it is satisfied when every group shows at most ``threshold`` colors.  A prefix
that already satisfies a target is skipped as a whole, since none of its
extensions can refute.

``find_proper_coloring`` is a constraint solver for hypergraph coloring with
forward checking and a most-constrained-variable rule.  It shares no code
with ``sweep`` on purpose: the two are used to cross-check each other.
"""

from __future__ import annotations

import atexit
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .errors import BudgetExceeded

DEFAULT_BUDGET = 2 ** 26
DEFAULT_NODE_BUDGET = 5_000_000


def default_budget() -> int:
    env = os.environ.get("RAMSEY_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"RAMSEY_BUDGET must be an integer, got {env!r}") from None
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class SweepResult:
    holds: bool
    coloring: tuple[int, ...] | None  # colors 1..r indexed by variable
    checked: int


class _Problem:
    __slots__ = ("n_vars", "r", "threshold", "free", "completing", "fixed_ok")

    def __init__(self, n_vars, r, targets, threshold, fixed):
        fixed = sorted(set(fixed))
        self.n_vars = n_vars
        self.r = r
        self.threshold = threshold
        fixed_set = set(fixed)
        self.free = [v for v in range(n_vars) if v not in fixed_set]
        pos = {v: i for i, v in enumerate(self.free)}
        self.completing = [[] for _ in self.free]
        # a target all of whose variables are fixed is decided up front
        self.fixed_ok = False
        for t in targets:
            groups = tuple(tuple(g) for g in t if len(g))
            free_pos = [pos[v] for g in groups for v in g if v in pos]
            if not free_pos:
                # fixed variables all carry color 1, so this target always holds
                self.fixed_ok = True
                continue
            self.completing[max(free_pos)].append(groups)


def _satisfied(groups, col, threshold) -> bool:
    if threshold == 1:
        for g in groups:
            c = col[g[0]]
            for v in g:
                if col[v] != c:
                    return False
        return True
    for g in groups:
        if len({col[v] for v in g}) > threshold:
            return False
    return True


def _run_from(prob: _Problem, prefix: Sequence[int]) -> tuple[int, ...] | None:
    """Lexicographically first refutation extending ``prefix`` (colors of
    the first free variables), or None."""
    col = [1] * prob.n_vars
    free, completing, r, th = prob.free, prob.completing, prob.r, prob.threshold
    for p, c in enumerate(prefix):
        col[free[p]] = c
        for groups in completing[p]:
            if _satisfied(groups, col, th):
                return None
    n = len(free)
    start = len(prefix)
    if start == n:
        return tuple(col)

    def rec(p: int) -> bool:
        v = free[p]
        comp = completing[p]
        last = p + 1 == n
        for c in range(1, r + 1):
            col[v] = c
            ok = True
            for groups in comp:
                if _satisfied(groups, col, th):
                    ok = False
                    break
            if ok and (last or rec(p + 1)):
                return True
        return False

    return tuple(col) if rec(start) else None


def _worker(args):
    prob, prefixes = args
    for i, pre in prefixes:
        found = _run_from(prob, pre)
        if found is not None:
            return i, found
    return None


_POOLS: dict[int, ProcessPoolExecutor] = {}


def _pool(jobs: int) -> ProcessPoolExecutor:
    ex = _POOLS.get(jobs)
    if ex is None:
        ex = ProcessPoolExecutor(max_workers=jobs)
        _POOLS[jobs] = ex
    return ex


@atexit.register
def _shutdown_pools() -> None:
    for ex in _POOLS.values():
        ex.shutdown(wait=False, cancel_futures=True)
    _POOLS.clear()


def _prefixes(depth: int, r: int):
    for i in range(r ** depth):
        digits = []
        x = i
        for _ in range(depth):
            digits.append(x % r + 1)
            x //= r
        yield i, tuple(reversed(digits))


def sweep(
    n_vars: int,
    r: int,
    targets: Sequence[Sequence[Sequence[int]]],
    threshold: int = 1,
    fixed: Sequence[int] = (),
    budget: int | None = None,
    jobs: int = 1,
) -> SweepResult:
    """Search all ``r``-colorings of ``n_vars`` variables for a refutation.

    Variables listed in ``fixed`` are pinned to color 1 (used to quotient out
    color renaming).  ``checked`` is the 1-based counter position of the
    returned refutation in the reduced space, or the size of that space when
    none exists; it does not depend on ``jobs``.
    """
    if r < 1:
        raise ValueError("need at least one color")
    budget = default_budget() if budget is None else budget
    prob = _Problem(n_vars, r, targets, threshold, fixed)
    n_free = len(prob.free)
    space = r ** n_free
    if space > budget:
        raise BudgetExceeded(f"search space {r}^{n_free} exceeds budget {budget}", space, budget)
    if prob.fixed_ok:
        return SweepResult(True, None, space)

    found = None
    depth = 0
    if jobs > 1:
        while depth < n_free and r ** depth < 8 * jobs:
            depth += 1
        depth = min(depth, max(0, n_free - 4))
    if jobs <= 1 or depth == 0:
        found = _run_from(prob, ())
    else:
        tasks = list(_prefixes(depth, r))
        chunk = max(1, len(tasks) // (4 * jobs))
        batches = [tasks[i:i + chunk] for i in range(0, len(tasks), chunk)]
        ex = _pool(jobs)
        futures = [ex.submit(_worker, (prob, b)) for b in batches]
        for fut in futures:
            res = fut.result()
            if res is not None:
                found = res[1]
                for f in futures:
                    f.cancel()
                break

    if found is None:
        return SweepResult(True, None, space)
    rank = 0
    for v in prob.free:
        rank = rank * r + (found[v] - 1)
    return SweepResult(False, found, rank + 1)


# --------------------------------------------------------------------------
# constraint solver


def find_proper_coloring(
    n_vertices: int,
    edges: Sequence[Sequence[int]],
    r: int,
    node_budget: int | None = None,
    symmetry: bool = True,
) -> tuple[int, ...] | None:
    """An ``r``-coloring (colors ``1..r``) with no monochromatic edge, or None.

    An edge with fewer than two distinct vertices can never be properly
    colored.  ``node_budget`` bounds the number of search nodes.
    """
    node_budget = DEFAULT_NODE_BUDGET if node_budget is None else node_budget
    edge_list = [tuple(sorted(set(e))) for e in edges]
    if any(len(e) < 2 for e in edge_list):
        return None
    if r < 2:
        return None if edge_list else tuple([1] * n_vertices)
    edge_list = sorted(set(edge_list))
    incident: list[list[int]] = [[] for _ in range(n_vertices)]
    for ei, e in enumerate(edge_list):
        for v in e:
            incident[v].append(ei)
    static = sorted(range(n_vertices), key=lambda v: (-len(incident[v]), v))
    rank = {v: i for i, v in enumerate(static)}
    color = [0] * n_vertices
    # forbidden[v][c] counts reasons why color c is blocked at v
    forbidden = [[0] * (r + 1) for _ in range(n_vertices)]
    nodes = 0

    def assign(v: int, c: int, trail: list) -> bool:
        color[v] = c
        for ei in incident[v]:
            e = edge_list[ei]
            free = None
            n_free = 0
            mono = True
            for u in e:
                cu = color[u]
                if cu == 0:
                    n_free += 1
                    free = u
                elif cu != c:
                    mono = False
                    break
            if not mono:
                continue
            if n_free == 0:
                return False
            if n_free == 1:
                forbidden[free][c] += 1
                trail.append((free, c))
                if all(forbidden[free][k] for k in range(1, r + 1)):
                    return False
        return True

    def undo(v: int, trail: list) -> None:
        for u, c in trail:
            forbidden[u][c] -= 1
        color[v] = 0

    def pick() -> int | None:
        best = None
        best_key = None
        for v in static:
            if color[v]:
                continue
            opts = sum(1 for k in range(1, r + 1) if not forbidden[v][k])
            key = (opts, rank[v])
            if best_key is None or key < best_key:
                best, best_key = v, key
                if opts <= 1:
                    break
        return best

    first = static[0] if n_vertices else None

    def rec() -> bool:
        nonlocal nodes
        v = pick()
        if v is None:
            return True
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded(f"constraint search exceeded {node_budget} nodes", nodes, node_budget)
        colors = range(1, r + 1)
        if symmetry and v == first and all(c == 0 for c in color):
            colors = (1,)
        for c in colors:
            if forbidden[v][c]:
                continue
            trail: list = []
            if assign(v, c, trail) and rec():
                return True
            undo(v, trail)
        return False

    if rec():
        return tuple(color)
    return None
