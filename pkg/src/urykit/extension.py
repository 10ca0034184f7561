"""Metric types, one-point realization and bi-Lipschitz one-point extension."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import InputError, PreconditionError
from .metric import (
    FiniteMetricSpace,
    PartialMap,
    WeightedGraph,
    as_rat,
    distortion,
    pair_ratio,
    path_completion,
)


@dataclass(frozen=True)
class MetricType:
    """Candidate distance vector ``p`` of a new point over ``base``."""

    base: FiniteMetricSpace
    p: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", tuple(as_rat(x) for x in self.p))

    def violation(self) -> tuple[int, ...] | None:
        """First witness against the type conditions, or ``None``.

        A 1-tuple flags a non-positive value; a pair ``(x, y)`` flags
        ``|p(x) - p(y)| > d(x, y)`` or ``p(x) + p(y) < d(x, y)``.
        """
        if len(self.p) != len(self.base):
            raise InputError(f"type has {len(self.p)} values for a {len(self.base)}-point base")
        p, d = self.p, self.base.d
        for i, v in enumerate(p):
            if v <= 0:
                return (i,)
        for i, j in combinations(range(len(p)), 2):
            if abs(p[i] - p[j]) > d[i][j] or p[i] + p[j] < d[i][j]:
                return (i, j)
        return None

    def is_valid(self) -> bool:
        return self.violation() is None


def realize_type(space: FiniteMetricSpace, t: MetricType) -> FiniteMetricSpace:
    """Append one point whose distances to ``space`` are ``t.p``."""
    if t.base != space:
        raise InputError("type is over a different base space")
    bad = t.violation()
    if bad is not None:
        raise InputError(f"type violates the metric type conditions at {bad}")
    return add_point(space, t.p)


def add_point(space: FiniteMetricSpace, dists: Sequence[Fraction], label: str | None = None) -> FiniteMetricSpace:
    n = len(space)
    rows = [list(row) + [dists[i]] for i, row in enumerate(space.d)]
    rows.append(list(dists) + [Fraction(0)])
    labels = space.labels + ((label if label is not None else str(n)),)
    return FiniteMetricSpace.from_rows(rows, labels)


@dataclass(frozen=True)
class Extension:
    target: FiniteMetricSpace
    map: PartialMap
    lam: Fraction


def extend_one_point(x_space: FiniteMetricSpace, m: PartialMap, theta) -> Extension:
    """Extend ``m`` to the last point of ``x_space`` keeping distortion below ``theta``.

    The new target point starts at ``lam * d_X`` from the image points with
    ``lam`` halfway between the current distortion and ``theta``, and the
    target is then closed under shortest paths. Old target distances never
    change.
    """
    theta = as_rat(theta)
    if theta <= 1:
        raise InputError(f"theta must exceed 1, got {theta}")
    if m.source != x_space:
        raise InputError("the partial map must be defined on x_space")
    new = len(x_space) - 1
    if new < 0 or new in m.domain:
        raise InputError("the last point of x_space must lie outside the map's domain")
    current = distortion(m)
    if not current < theta:
        raise PreconditionError(f"distortion {current} is not below theta {theta}")
    lam = (current + theta) / 2
    target = m.target
    t = len(target)

    if not m.pairs:
        reach = max((max(row) for row in target.d), default=Fraction(0)) or Fraction(1)
        grown = add_point(target, [reach] * t, f"y{new}")
        return Extension(grown, PartialMap(x_space, grown, ((new, t),)), lam)

    graph = WeightedGraph.complete(target)
    edges = dict(graph.edges)
    for a, b in m.pairs:
        edges[frozenset((b, t))] = lam * x_space.d[new][a]
    closed = path_completion(WeightedGraph(t + 1, edges, target.labels + (f"y{new}",)))
    return Extension(closed, PartialMap(x_space, closed, m.pairs + ((new, t),)), lam)


def rank_witnesses(
    space: FiniteMetricSpace,
    pool: Iterable[int],
    f: PartialMap,
    new_dists: Mapping[int, Fraction],
    lam,
) -> list[tuple[Fraction, int]]:
    """Every pool point that extends ``f`` below ``lam``, as ``(distortion, index)`` sorted.

    ``f`` maps some source space into ``space``; ``new_dists[a]`` is the
    distance of the external point to each source point ``a`` of ``f``.
    """
    lam = as_rat(lam)
    base = distortion(f)
    if not base < lam:
        return []
    used = set(f.image)
    d = space.d
    pairs = [(as_rat(new_dists[a]), b) for a, b in f.pairs]
    fits = []
    for y in sorted(set(pool)):
        if y in used:
            continue
        worst = base
        row = d[y]
        for dx, b in pairs:
            r = pair_ratio(dx, row[b])
            if r > worst:
                worst = r
                if not worst < lam:
                    break
        if worst < lam:
            fits.append((worst, y))
    fits.sort()
    return fits


def check_almost_extension(
    space: FiniteMetricSpace,
    candidate_pool: Iterable[int],
    f: PartialMap,
    new_dists: Mapping[int, Fraction],
    lam,
) -> int | None:
    """Pool point ``y`` with ``f + {x_new: y}`` below ``lam``, else ``None``.

    The scan covers the whole pool, so ``None`` certifies that no pool point
    works. Among witnesses the one with the smallest distortion wins, ties
    going to the lowest index.
    """
    lam = as_rat(lam)
    if lam <= 1:
        raise InputError(f"lambda must exceed 1, got {lam}")
    if f.target != space:
        raise InputError("the partial map must land in the searched space")
    missing = [a for a in f.domain if a not in new_dists]
    if missing:
        raise InputError(f"no distance from the new point to source points {missing}")
    current = distortion(f)
    if not current < lam:
        raise PreconditionError(f"distortion {current} is not below lambda {lam}")
    fits = rank_witnesses(space, candidate_pool, f, new_dists, lam)
    return fits[0][1] if fits else None
