"""Combinatorial lines in ``[m]^d`` and small Hales-Jewett numbers.

Points are tuples over ``1..m``.  A line is a word over ``[m] ∪ {'*'}`` with
at least one ``'*'``; its ``k``-th point replaces every ``'*'`` by ``k``.
Words are ordered with ``'*'`` before the digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Mapping

from .core import dumps
from .errors import BudgetExceeded
from .search import default_budget, find_proper_coloring, sweep

STAR = "*"


@dataclass(frozen=True)
class CombinatorialLine:
    m: int
    d: int
    word: tuple  # entries are STAR or ints in 1..m

    def __post_init__(self):
        if len(self.word) != self.d:
            raise ValueError("word length must equal d")
        if STAR not in self.word:
            raise ValueError("a line needs at least one moving coordinate")
        for x in self.word:
            if x != STAR and not (isinstance(x, int) and 1 <= x <= self.m):
                raise ValueError(f"bad letter {x!r}")

    @property
    def moving(self) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.word) if x == STAR)

    def point(self, k: int) -> tuple[int, ...]:
        if not 1 <= k <= self.m:
            raise ValueError(f"k must lie in 1..{self.m}")
        return tuple(k if x == STAR else x for x in self.word)

    def points(self) -> list[tuple[int, ...]]:
        return [self.point(k) for k in range(1, self.m + 1)]

    def to_json(self) -> dict:
        return {"m": self.m, "d": self.d, "word": list(self.word)}

    @classmethod
    def from_json(cls, data: Mapping) -> CombinatorialLine:
        return cls(data["m"], data["d"], tuple(data["word"]))

    def dumps(self) -> str:
        return dumps(self.to_json())


def line_point(L: CombinatorialLine, k: int) -> tuple[int, ...]:
    return L.point(k)


def points(m: int, d: int) -> list[tuple[int, ...]]:
    return list(product(range(1, m + 1), repeat=d))


def enumerate_lines(m: int, d: int) -> list[CombinatorialLine]:
    if m < 1 or d < 0:
        raise ValueError("need m >= 1 and d >= 0")
    alphabet = [STAR] + list(range(1, m + 1))
    return [CombinatorialLine(m, d, w) for w in product(alphabet, repeat=d) if STAR in w]


def count_lines(m: int, d: int) -> int:
    return (m + 1) ** d - m ** d


def _line_targets(m: int, d: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    pts = points(m, d)
    index = {p: i for i, p in enumerate(pts)}
    lines = [tuple(index[p] for p in L.points()) for L in enumerate_lines(m, d)]
    return pts, lines


def find_mono_line(
    coloring: Mapping[tuple[int, ...], int] | Callable[[tuple[int, ...]], int], m: int, d: int
) -> CombinatorialLine | None:
    """First line (in enumeration order) whose points all share one color."""
    color = coloring if callable(coloring) else coloring.__getitem__
    for L in enumerate_lines(m, d):
        cs = {color(p) for p in L.points()}
        if len(cs) == 1:
            return L
    return None


@dataclass(frozen=True)
class HJResult:
    m: int
    r: int
    d: int | None
    # per dimension tried: (d, verdict, checked, refuting coloring or None)
    trace: tuple

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "r": self.r,
            "d": self.d,
            "trace": [
                {"d": d, "verdict": v, "checked": c, **({"coloring": list(col)} if col else {})}
                for d, v, c, col in self.trace
            ],
        }

    def dumps(self) -> str:
        return dumps(self.to_json())


def hj_sweep(m: int, r: int, d_max: int, budget: int | None = None, jobs: int = 1) -> HJResult:
    """Exhaustive search for the least ``d <= d_max`` such that every
    ``r``-coloring of ``[m]^d`` has a monochromatic line."""
    if m < 1 or r < 1:
        raise ValueError("need m >= 1 and r >= 1")
    budget = default_budget() if budget is None else budget
    trace = []
    for d in range(1, d_max + 1):
        pts, lines = _line_targets(m, d)
        res = sweep(len(pts), r, [(L,) for L in lines], fixed=(0,) if r > 1 else (), budget=budget, jobs=jobs)
        trace.append((d, "holds" if res.holds else "fails", res.checked, res.coloring))
        if res.holds:
            return HJResult(m, r, d, tuple(trace))
    return HJResult(m, r, None, tuple(trace))


def hj_number(m: int, r: int, d_max: int, budget: int | None = None, jobs: int = 1) -> int | None:
    """Least such ``d``, or None when no ``d <= d_max`` works.

    Raises :class:`BudgetExceeded` when some dimension cannot be swept.
    """
    return hj_sweep(m, r, d_max, budget=budget, jobs=jobs).d


def lines_force_monochromatic(m: int, r: int, d: int, node_budget: int | None = None) -> bool:
    """Whether every ``r``-coloring of ``[m]^d`` has a monochromatic line,
    decided with the constraint solver instead of the sweep."""
    pts, lines = _line_targets(m, d)
    return find_proper_coloring(len(pts), lines, r, node_budget=node_budget) is None


def hj_dimension(m: int, r: int, d_max: int = 6, budget: int | None = None, node_budget: int | None = None) -> int:
    """Least ``d`` forcing a monochromatic line, via whichever search fits.

    Raises :class:`BudgetExceeded` if neither search can settle some ``d``.
    """
    if m == 1 or r == 1:
        return 1
    for d in range(1, d_max + 1):
        try:
            pts, lines = _line_targets(m, d)
            res = sweep(len(pts), r, [(L,) for L in lines], fixed=(0,), budget=budget)
            if res.holds:
                return d
            continue
        except BudgetExceeded:
            pass
        if lines_force_monochromatic(m, r, d, node_budget=node_budget):
            return d
    raise BudgetExceeded(f"no dimension up to {d_max} forces a monochromatic line", None, d_max)
