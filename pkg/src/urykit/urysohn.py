"""Finite rational levels A_0 ⊆ A_1 ⊆ ... approximating the Urysohn space.

Level ``n+1`` adds one point for every rational type over level ``n`` whose
values are at most ``n+1`` with denominator at most ``n+1``. Two new points
sit at the largest distance their types allow, ``min_x p1(x) + p2(x)``.
"""

from __future__ import annotations

import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterator

import numpy as np

from .budget import point_budget
from .errors import BudgetError, InputError
from .extension import MetricType
from .metric import FiniteMetricSpace


def rational_grid(value_bound, denom_bound: int) -> list[Fraction]:
    """Sorted positive rationals ``<= value_bound`` with denominator ``<= denom_bound``."""
    value_bound = Fraction(value_bound)
    if denom_bound < 1:
        raise InputError("denominator bound must be positive")
    values = set()
    for b in range(1, denom_bound + 1):
        top = value_bound * b
        for a in range(1, int(top) + 1):
            values.add(Fraction(a, b))
    return sorted(values)


def _window(level: FiniteMetricSpace, p: list[Fraction], i: int, hi: Fraction) -> tuple[Fraction, Fraction]:
    lo = Fraction(0)
    row = level.d[i]
    for j in range(i):
        dij = row[j]
        lo = max(lo, abs(p[j] - dij))
        hi = min(hi, p[j] + dij)
    return lo, hi


def iter_rational_types(level: FiniteMetricSpace, value_bound, denom_bound: int) -> Iterator[tuple[Fraction, ...]]:
    """Lexicographic stream of admissible rational distance vectors over ``level``."""
    grid = rational_grid(value_bound, denom_bound)
    value_bound = Fraction(value_bound)
    n = len(level)
    p: list[Fraction] = [Fraction(0)] * n

    def rec(i: int) -> Iterator[tuple[Fraction, ...]]:
        if i == n:
            yield tuple(p)
            return
        lo, hi = _window(level, p, i, value_bound)
        # strictly positive values only: the grid starts above 0
        for v in grid[bisect_left(grid, lo) : bisect_right(grid, hi)]:
            p[i] = v
            yield from rec(i + 1)

    yield from rec(0)


def enumerate_rational_types(level: FiniteMetricSpace, value_bound, denom_bound: int) -> list[MetricType]:
    return [MetricType(level, p) for p in iter_rational_types(level, value_bound, denom_bound)]


def sample_rational_types(
    level: FiniteMetricSpace, value_bound, denom_bound: int, count: int, seed: int, max_tries: int | None = None
) -> list[tuple[Fraction, ...]]:
    """Up to ``count`` distinct random types, in lexicographic order.

    Each draw fills coordinates left to right from the admissible window and
    restarts on a dead end, so the result is a seeded subset, not a uniform one.
    """
    grid = rational_grid(value_bound, denom_bound)
    value_bound = Fraction(value_bound)
    rng = random.Random(seed)
    n = len(level)
    found: set[tuple[Fraction, ...]] = set()
    tries = max_tries if max_tries is not None else 50 * count + 100
    for _ in range(tries):
        if len(found) >= count:
            break
        p: list[Fraction] = []
        for i in range(n):
            lo, hi = _window(level, p, i, value_bound)
            choices = grid[bisect_left(grid, lo) : bisect_right(grid, hi)]
            if not choices:
                break
            p.append(rng.choice(choices))
        else:
            found.add(tuple(p))
    return sorted(found)


@dataclass(frozen=True)
class UrysohnLevels:
    """Levels ``A_0 .. A_k``; each is an initial segment of the next.

    ``faithful[n]`` is False when level ``n`` was grown from a sampled subset
    of the types over level ``n-1``.
    """

    levels: tuple[FiniteMetricSpace, ...]
    faithful: tuple[bool, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.faithful:
            object.__setattr__(self, "faithful", (True,) * len(self.levels))
        if len(self.faithful) != len(self.levels):
            raise InputError("one faithfulness flag per level is required")

    @classmethod
    def singleton(cls) -> UrysohnLevels:
        return cls((FiniteMetricSpace(((Fraction(0),),), ("a0",)),))

    def __len__(self) -> int:
        return len(self.levels)

    def __getitem__(self, n: int) -> FiniteMetricSpace:
        return self.levels[n]

    @staticmethod
    def value_bound(n: int) -> Fraction:
        return Fraction(n + 1)

    @staticmethod
    def denom_bound(n: int) -> int:
        return n + 1


def _join(old: FiniteMetricSpace, types: list[tuple[Fraction, ...]], n_next: int) -> FiniteMetricSpace:
    n = len(old)
    t = len(types)
    for p in types:
        assert len(p) == n
    size = n + t
    if n == 0:
        raise InputError("cannot grow from an empty level")
    # Exact integer arithmetic on a common denominator for the min-sum step.
    den = lcm(*(v.denominator for p in types for v in p)) if types else 1
    new_new: list[list[Fraction]] = []
    if t:
        scaled = np.array([[int(v * den) for v in p] for p in types], dtype=object)
        if scaled.size and max(int(x) for x in scaled.flat) < 2**61:
            scaled = scaled.astype(np.int64)
        mins = np.empty((t, t), dtype=scaled.dtype)
        for a in range(t):
            mins[a] = (scaled[a][None, :] + scaled).min(axis=1)
        new_new = [[Fraction(int(x), den) for x in row] for row in mins]
    rows: list[list[Fraction]] = []
    for i in range(n):
        rows.append(list(old.d[i]) + [p[i] for p in types])
    for a, p in enumerate(types):
        row = list(p) + new_new[a]
        row[n + a] = Fraction(0)
        rows.append(row)
    labels = old.labels + tuple(f"a{n_next}.{k}" for k in range(t))
    assert len(rows) == size
    return FiniteMetricSpace.from_rows(rows, labels)


def build_level(
    levels: UrysohnLevels,
    budget: int | None = None,
    sample: int | None = None,
    seed: int = 0,
) -> UrysohnLevels:
    """Return ``levels`` with one more level appended.

    Without ``sample`` every admissible type is realized and the build stops
    with :class:`BudgetError` once the point count would pass ``budget``.
    With ``sample`` only a seeded subset of types is realized and the new
    level is flagged as not faithful.
    """
    if not len(levels):
        raise InputError("levels must start from a nonempty A_0")
    limit = point_budget(budget)
    n = len(levels) - 1
    old = levels[n]
    vb, db = UrysohnLevels.value_bound(n), UrysohnLevels.denom_bound(n)
    if sample is None:
        types = []
        for p in iter_rational_types(old, vb, db):
            types.append(p)
            if len(old) + len(types) > limit:
                raise BudgetError(
                    f"level {n + 1} needs more than {limit} points; pass a larger budget or use sampled mode"
                )
    else:
        if len(old) + sample > limit:
            raise BudgetError(f"sampled level {n + 1} would have {len(old) + sample} points, budget {limit}")
        types = sample_rational_types(old, vb, db, sample, seed)
    grown = _join(old, types, n + 1)
    return UrysohnLevels(levels.levels + (grown,), levels.faithful + (sample is None,))


def build_levels(count: int, budget: int | None = None, sample: int | None = None, seed: int = 0) -> UrysohnLevels:
    """Levels ``A_0 .. A_count``; ``sample`` applies only where faithful growth would exceed the budget."""
    levels = UrysohnLevels.singleton()
    for _ in range(count):
        try:
            levels = build_level(levels, budget)
        except BudgetError:
            if sample is None:
                raise
            levels = build_level(levels, budget, sample=sample, seed=seed)
    return levels


def check_level_property(levels: UrysohnLevels, n: int) -> tuple[Fraction, ...] | None:
    """First type over level ``n`` not realized in level ``n+1``; ``None`` means ok."""
    if not 0 <= n < len(levels) - 1:
        raise InputError(f"level {n + 1} has not been built")
    old, nxt = levels[n], levels[n + 1]
    k = len(old)
    realized = {tuple(nxt.d[y][:k]) for y in range(len(nxt))}
    for p in iter_rational_types(old, UrysohnLevels.value_bound(n), UrysohnLevels.denom_bound(n)):
        if p not in realized:
            return p
    return None


def is_prefix(small: FiniteMetricSpace, big: FiniteMetricSpace) -> bool:
    k = len(small)
    return k <= len(big) and all(tuple(big.d[i][:k]) == small.d[i] for i in range(k))
