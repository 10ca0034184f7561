"""Finite metric spaces over exact rationals.

Every distance is a :class:`fractions.Fraction`; nothing here touches floats,
so strict inequalities such as ``ratio < lam`` are decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import InputError

Rat = Fraction

#: Returned by :func:`distortion` when a map collapses a positive distance to 0.
INFINITE = math.inf


def as_rat(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise InputError(f"float {value!r} is not an exact rational")
    return Fraction(value)


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Points ``0..n-1`` with optional labels and an exact distance matrix.

    Construction only normalizes entries to ``Fraction``; the metric axioms are
    checked by :func:`validate_metric` so that broken inputs can be reported.
    """

    d: tuple[tuple[Fraction, ...], ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        rows = tuple(tuple(as_rat(x) for x in row) for row in self.d)
        object.__setattr__(self, "d", rows)
        labels = tuple(str(x) for x in self.labels) or tuple(str(i) for i in range(len(rows)))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], labels: Sequence[str] = ()) -> FiniteMetricSpace:
        return cls(tuple(tuple(r) for r in rows), tuple(labels))

    def __len__(self) -> int:
        return len(self.d)

    def dist(self, i: int, j: int) -> Fraction:
        return self.d[i][j]

    def subspace(self, indices: Sequence[int]) -> FiniteMetricSpace:
        return FiniteMetricSpace(
            tuple(tuple(self.d[i][j] for j in indices) for i in indices),
            tuple(self.labels[i] for i in indices),
        )

    def scaled(self, factor) -> FiniteMetricSpace:
        factor = as_rat(factor)
        return FiniteMetricSpace(tuple(tuple(x * factor for x in row) for row in self.d), self.labels)


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple[int, ...]

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "witness": list(self.witness)}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        out: dict = {"ok": self.ok}
        if self.violations:
            out["violations"] = [v.to_json() for v in self.violations]
        return out


def check_shape(space: FiniteMetricSpace) -> None:
    n = len(space.d)
    if len(space.labels) != n:
        raise InputError(f"{len(space.labels)} labels for a {n}-row matrix")
    for i, row in enumerate(space.d):
        if len(row) != n:
            raise InputError(f"matrix is not square: row {i} has {len(row)} entries, expected {n}")
        for j, x in enumerate(row):
            if x < 0:
                raise InputError(f"negative distance d[{i}][{j}] = {x}")


def validate_metric(space: FiniteMetricSpace) -> ValidationReport:
    """Check every metric axiom and list each violation with a witness.

    Triangle witnesses ``(i, j, k)`` mean ``d[i][k] > d[i][j] + d[j][k]`` and
    are listed once per unordered endpoint pair ``i < k``.
    """
    check_shape(space)
    d = space.d
    n = len(d)
    found: list[Violation] = []
    for i in range(n):
        if d[i][i] != 0:
            found.append(Violation("zero_diagonal", (i,)))
    for i, j in combinations(range(n), 2):
        if d[i][j] != d[j][i]:
            found.append(Violation("symmetry", (i, j)))
        if d[i][j] == 0 or d[j][i] == 0:
            found.append(Violation("positivity", (i, j)))
    for i, k in combinations(range(n), 2):
        dik = d[i][k]
        for j in range(n):
            if j != i and j != k and dik > d[i][j] + d[j][k]:
                found.append(Violation("triangle", (i, j, k)))
    return ValidationReport(tuple(found))


def is_ultrametric(space: FiniteMetricSpace) -> bool:
    d = space.d
    n = len(d)
    for i, k in combinations(range(n), 2):
        dik = d[i][k]
        for j in range(n):
            if dik > max(d[i][j], d[j][k]):
                return False
    return True


def spectrum(space: FiniteMetricSpace) -> list[Fraction]:
    return sorted({space.d[i][j] for i, j in combinations(range(len(space)), 2)})


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with positive rational edge weights."""

    n: int
    edges: dict[frozenset, Fraction] = field(default_factory=dict)
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        clean: dict[frozenset, Fraction] = {}
        for key, w in self.edges.items():
            pair = frozenset(key)
            if len(pair) != 2:
                raise InputError(f"self-loop or malformed edge {tuple(key)!r}")
            if not all(0 <= v < self.n for v in pair):
                raise InputError(f"edge {tuple(sorted(pair))} references a missing vertex")
            w = as_rat(w)
            if w <= 0:
                raise InputError(f"edge {tuple(sorted(pair))} has non-positive weight {w}")
            if pair in clean and clean[pair] != w:
                raise InputError(f"edge {tuple(sorted(pair))} given two different weights")
            clean[pair] = w
        object.__setattr__(self, "edges", clean)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, object]], labels: Sequence[str] = ()) -> WeightedGraph:
        table: dict[frozenset, Fraction] = {}
        for u, v, w in edges:
            key = frozenset((u, v))
            w = as_rat(w)
            if key in table and table[key] != w:
                raise InputError(f"edge {(u, v)} given two different weights")
            table[key] = w
        return cls(n, table, tuple(labels))

    @classmethod
    def complete(cls, space: FiniteMetricSpace) -> WeightedGraph:
        edges = {frozenset((i, j)): space.d[i][j] for i, j in combinations(range(len(space)), 2)}
        return cls(len(space), edges, space.labels)


def path_completion(g: WeightedGraph) -> FiniteMetricSpace:
    """Shortest-path metric of a connected positively weighted graph.

    Floyd-Warshall over exact rationals; the result does not depend on the
    relaxation order because shortest-path lengths are unique.
    """
    n = g.n
    if n == 0:
        return FiniteMetricSpace((), ())
    dist: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    for i in range(n):
        dist[i][i] = Fraction(0)
    for pair, w in g.edges.items():
        u, v = sorted(pair)
        dist[u][v] = dist[v][u] = w
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik is None:
                continue
            di = dist[i]
            for j in range(n):
                dkj = dk[j]
                if dkj is None:
                    continue
                via = dik + dkj
                if di[j] is None or via < di[j]:
                    di[j] = via
    for i in range(n):
        for j in range(n):
            if dist[i][j] is None:
                raise InputError(f"graph is disconnected: no path from {i} to {j}")
    return FiniteMetricSpace(tuple(tuple(row) for row in dist), g.labels)


@dataclass(frozen=True)
class PartialMap:
    """An injection from points of ``source`` to points of ``target``."""

    source: FiniteMetricSpace
    target: FiniteMetricSpace
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        dom = [a for a, _ in pairs]
        ran = [b for _, b in pairs]
        if len(set(dom)) != len(dom) or len(set(ran)) != len(ran):
            raise InputError("partial map is not injective")
        for a, b in pairs:
            if not (0 <= a < len(self.source)) or not (0 <= b < len(self.target)):
                raise InputError(f"pair {(a, b)} is out of range")

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.pairs)

    @property
    def image(self) -> tuple[int, ...]:
        return tuple(b for _, b in self.pairs)

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def restrict(self, keep: Iterable[int]) -> PartialMap:
        keep = set(keep)
        return PartialMap(self.source, self.target, tuple(p for p in self.pairs if p[0] in keep))

    def extended(self, a: int, b: int, target: FiniteMetricSpace | None = None) -> PartialMap:
        return PartialMap(self.source, target if target is not None else self.target, self.pairs + ((a, b),))

    def inverse(self) -> PartialMap:
        return PartialMap(self.target, self.source, tuple((b, a) for a, b in self.pairs))

    @classmethod
    def identity(cls, space: FiniteMetricSpace, count: int | None = None) -> PartialMap:
        n = len(space) if count is None else count
        return cls(space, space, tuple((i, i) for i in range(n)))


def pair_ratio(dx: Fraction, dy: Fraction) -> Fraction | float:
    """Two-sided ratio ``max(dy/dx, dx/dy)``; 1 when both vanish."""
    if dx == 0 or dy == 0:
        return Fraction(1) if dx == dy else INFINITE
    return dy / dx if dy >= dx else dx / dy


def worst_pair(m: PartialMap) -> tuple[Fraction | float, tuple[int, int] | None]:
    """Largest two-sided ratio and the first pair of matched sources achieving it."""
    best: Fraction | float = Fraction(1)
    arg = None
    pairs = m.pairs
    dx, dy = m.source.d, m.target.d
    for (a1, b1), (a2, b2) in combinations(pairs, 2):
        r = pair_ratio(dx[a1][a2], dy[b1][b2])
        if arg is None or r > best:
            best, arg = r, (a1, a2)
    return best, arg


def distortion(m: PartialMap) -> Fraction | float:
    """Exact distortion; the map is lam-bi-Lipschitz iff the result is < lam.

    Maps with fewer than two pairs have distortion 1.
    """
    return worst_pair(m)[0]
