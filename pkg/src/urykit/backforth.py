"""Back-and-forth construction of bi-Lipschitz matchings between finite spaces."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InputError
from .extension import rank_witnesses
from .metric import FiniteMetricSpace, PartialMap, as_rat, check_shape, worst_pair


def default_schedule(lam, steps: int) -> tuple[Fraction, ...]:
    """``1 + (lam - 1) * (1 - 2**-(k+1))`` for ``k < steps``."""
    lam = as_rat(lam)
    return tuple(1 + (lam - 1) * (1 - Fraction(1, 2 ** (k + 1))) for k in range(steps))


@dataclass(frozen=True)
class MatchPlan:
    lam: Fraction
    max_points: int
    slack_schedule: tuple[Fraction, ...] = ()
    side_order: str = "alternate"

    def __post_init__(self) -> None:
        lam = as_rat(self.lam)
        object.__setattr__(self, "lam", lam)
        if lam <= 1:
            raise InputError(f"lambda must exceed 1, got {lam}")
        if self.max_points < 0:
            raise InputError("max_points must be nonnegative")
        if self.side_order not in ("alternate", "forth"):
            raise InputError(f"unknown side order {self.side_order!r}")
        sched = tuple(as_rat(s) for s in self.slack_schedule) or default_schedule(lam, self.max_points)
        object.__setattr__(self, "slack_schedule", sched)
        if len(sched) < self.max_points:
            raise InputError(f"schedule has {len(sched)} entries for {self.max_points} steps")
        prev = Fraction(1)
        for k, s in enumerate(sched):
            if not prev < s < lam:
                raise InputError(f"schedule entry {k} = {s} breaks 1 < s_0 < s_1 < ... < lambda")
            prev = s

    def scaled_to(self, lam) -> MatchPlan:
        """Same plan for another lambda, with each slack rescaled on ``(1, lam)``."""
        lam = as_rat(lam)
        factor = (lam - 1) / (self.lam - 1)
        sched = tuple(1 + (s - 1) * factor for s in self.slack_schedule)
        return MatchPlan(lam, self.max_points, sched, self.side_order)


@dataclass(frozen=True)
class MatchFailure:
    step: int
    side: str
    point: int
    reason: str

    def __bool__(self) -> bool:
        return False


def _dists_to(space: FiniteMetricSpace, point: int, others: Sequence[int]) -> dict[int, Fraction]:
    row = space.d[point]
    return {o: row[o] for o in others}


def almost_isometry(X: FiniteMetricSpace, Y: FiniteMetricSpace, plan: MatchPlan) -> PartialMap | MatchFailure:
    """Match the first ``min(max_points, |X|, |Y|)`` points of ``X`` into ``Y``.

    Steps alternate between the X side (next unmatched X point, searched in
    all unmatched Y points) and the Y side (next unmatched Y point, searched
    among the unmatched X points of the target prefix). Step ``k`` must stay
    below ``plan.slack_schedule[k]``. The first step without a witness is
    returned as a :class:`MatchFailure`.
    """
    check_shape(X)
    check_shape(Y)
    m = min(plan.max_points, len(X), len(Y))
    prefix = range(m)
    fwd = PartialMap(X, Y)
    back = PartialMap(Y, X)
    matched_x: set[int] = set()
    matched_y: set[int] = set()

    for k in range(m):
        bound = plan.slack_schedule[k]
        x_turn = plan.side_order == "forth" or k % 2 == 0
        if x_turn:
            x = next(i for i in prefix if i not in matched_x)
            pool = [j for j in range(len(Y)) if j not in matched_y]
            fits = rank_witnesses(Y, pool, fwd, _dists_to(X, x, fwd.domain), bound)
            if not fits:
                return MatchFailure(k, "X", x, f"no point of Y extends the map below {bound}")
            y = fits[0][1]
        else:
            y = next(j for j in range(len(Y)) if j not in matched_y)
            pool = [i for i in prefix if i not in matched_x]
            fits = rank_witnesses(X, pool, back, _dists_to(Y, y, back.domain), bound)
            if not fits:
                return MatchFailure(k, "Y", y, f"no unmatched prefix point of X extends the map below {bound}")
            x = fits[0][1]
        fwd = fwd.extended(x, y)
        back = back.extended(y, x)
        matched_x.add(x)
        matched_y.add(y)
        assert worst_pair(fwd)[0] < bound

    pairs = tuple(sorted(fwd.pairs))
    result = PartialMap(X, Y, pairs)
    if certify_bilip(result, plan.lam) is not None:
        raise AssertionError("matching failed independent re-verification")
    return result


def certify_bilip(m: PartialMap, lam) -> tuple[tuple[int, int], Fraction] | None:
    """``None`` when ``m`` is strictly ``lam``-bi-Lipschitz, else the worst pair and its ratio.

    Checks ``dy < lam * dx`` and ``dx < lam * dy`` by cross-multiplication,
    independently of :func:`distortion`.
    """
    lam = as_rat(lam)
    pairs = list(m.pairs)
    dx_all, dy_all = m.source.d, m.target.d
    bad: list[tuple[Fraction | float, tuple[int, int]]] = []
    for i in range(len(pairs)):
        a1, b1 = pairs[i]
        for j in range(i + 1, len(pairs)):
            a2, b2 = pairs[j]
            dx, dy = dx_all[a1][a2], dy_all[b1][b2]
            if (dy < lam * dx and dx < lam * dy) or dx == dy == 0:
                continue
            if dx == 0 or dy == 0:
                ratio: Fraction | float = math.inf
            else:
                ratio = max(dy / dx, dx / dy)
            bad.append((ratio, (a1, a2)))
    if not bad:
        return None
    top = max(r for r, _ in bad)
    pair = next(p for r, p in bad if r == top)
    return pair, top
