"""Distance profiles of a point against a chain of subspaces.

For a chain ``X_0 ⊆ X_1 ⊆ ... ⊆ X_m`` and a point ``beta`` outside it,
``eps[n] = d(beta, X_n)`` is weakly decreasing. Large drops ``eps[n]/eps[n+1]``
code a set of indices, and a K-bi-Lipschitz map that respects the chain moves
every ratio by at most a factor ``2K^2``. Coding with drops above ``8K^6``
therefore survives any such map when decoded at threshold ``4K^4``.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BudgetError, InputError, PreconditionError
from .metric import FiniteMetricSpace, PartialMap, WeightedGraph, as_rat, path_completion

MAX_CHAIN_LENGTH = 64


@dataclass(frozen=True)
class ChainedSpace:
    space: FiniteMetricSpace
    chain: tuple[frozenset[int], ...]
    beta: int

    def __post_init__(self) -> None:
        chain = tuple(frozenset(int(i) for i in stage) for stage in self.chain)
        object.__setattr__(self, "chain", chain)
        n = len(self.space)
        if not chain:
            raise InputError("chain needs at least one stage")
        if not 0 <= self.beta < n:
            raise InputError(f"beta {self.beta} is not a point of the space")
        for j, stage in enumerate(chain):
            if not stage:
                raise InputError(f"chain stage {j} is empty")
            if any(not 0 <= i < n for i in stage):
                raise InputError(f"chain stage {j} references a missing point")
            if j and not chain[j - 1] <= stage:
                raise InputError(f"chain stage {j - 1} is not contained in stage {j}")
        if self.beta in chain[-1]:
            raise InputError("beta must lie outside the last chain stage")

    def to_json(self) -> dict:
        return {"chain": [sorted(s) for s in self.chain], "beta": self.beta}


def epsilon_sequence(cs: ChainedSpace) -> list[Fraction]:
    row = cs.space.d[cs.beta]
    return [min(row[x] for x in stage) for stage in cs.chain]


def ratios(eps: Sequence[Fraction]) -> list[Fraction]:
    eps = [as_rat(e) for e in eps]
    if any(e <= 0 for e in eps):
        raise InputError("epsilon values must be positive")
    if any(a < b for a, b in zip(eps, eps[1:])):
        raise InputError("epsilon sequence must be weakly decreasing")
    return [a / b for a, b in zip(eps, eps[1:])]


def phi_set(eps: Sequence[Fraction], K: int) -> frozenset[int]:
    """Indices whose drop ``eps[n]/eps[n+1]`` is strictly above ``2K^2``."""
    cut = 2 * K**2
    return frozenset(n for n, r in enumerate(ratios(eps)) if r > cut)


def theta_check(eps: Sequence[Fraction], K: int) -> tuple[bool, frozenset[int]]:
    """``(strict_form, theta_set)``: every drop is 1 or above ``4K^4``, and the drops above it."""
    cut = 4 * K**4
    rs = ratios(eps)
    strict = all(r == 1 or r > cut for r in rs)
    return strict, frozenset(n for n, r in enumerate(rs) if r > cut)


class DecodeMode(str, enum.Enum):
    SOURCE = "source"
    IMAGE = "image"


def decode_set(cs: ChainedSpace, K: int, threshold: DecodeMode | str = DecodeMode.SOURCE) -> frozenset[int]:
    eps = epsilon_sequence(cs)
    if DecodeMode(threshold) is DecodeMode.SOURCE:
        return phi_set(eps, K)
    return theta_check(eps, K)[1]


def default_gap(K: int) -> Fraction:
    return Fraction(16 * K**6)


def encode_set(A: Iterable[int], K: int, gap=None, m: int | None = None) -> ChainedSpace:
    """Tree ultrametric whose epsilon drops are ``>= gap`` exactly on ``A``.

    Points are branches off ``beta = 000...``: chain point ``n`` leaves beta
    after ``c_n`` common symbols, so ``d = 1/(c + 1)`` for common-prefix
    length ``c`` gives ``eps[n] = 1/(c_n + 1)``. ``c_{n+1} + 1`` is
    ``ceil(gap * (c_n + 1))`` for ``n`` in ``A`` and ``c_n + 1`` otherwise.
    Branches are stored by their branching depth, not spelled out. The chain
    has ``m + 1`` stages; ``m`` defaults to ``max(A) + 2``.
    """
    A = frozenset(int(a) for a in A)
    if m is None:
        m = max(A) + 2 if A else 1
    gap = default_gap(K) if gap is None else as_rat(gap)
    if K < 1:
        raise InputError("K must be a positive integer")
    if not gap > 8 * K**6:
        raise PreconditionError(f"gap {gap} must exceed 8K^6 = {8 * K**6}")
    if m > MAX_CHAIN_LENGTH:
        raise BudgetError(f"chain of length {m} exceeds the depth budget {MAX_CHAIN_LENGTH}")
    if any(not 0 <= a < m for a in A):
        raise InputError(f"A must be a subset of 0..{m - 1}")
    depth = [0]
    for n in range(m):
        c = depth[-1]
        if n in A:
            depth.append(_ceil(gap * (c + 1)) - 1)
        else:
            depth.append(c)
    # point i < m+1 is chain point i; point m+1 is beta
    size = m + 2
    beta = m + 1
    rows = [[Fraction(0)] * size for _ in range(size)]
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            rows[i][j] = rows[j][i] = Fraction(1, min(depth[i], depth[j]) + 1)
        rows[i][beta] = rows[beta][i] = Fraction(1, depth[i] + 1)
    labels = [f"c{i}@{depth[i]}" for i in range(m + 1)] + ["beta"]
    space = FiniteMetricSpace.from_rows(rows, labels)
    chain = tuple(frozenset(range(n + 1)) for n in range(m + 1))
    return ChainedSpace(space, chain, beta)


def _ceil(q: Fraction) -> int:
    return -(-q.numerator // q.denominator)


@dataclass(frozen=True)
class InequalityCheck:
    kind: str
    index: int
    lower: Fraction
    value: Fraction
    upper: Fraction

    @property
    def holds(self) -> bool:
        return self.lower <= self.value <= self.upper

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "index": self.index,
            "lower": _q(self.lower),
            "value": _q(self.value),
            "upper": _q(self.upper),
            "holds": self.holds,
        }


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class TransferReport:
    K: int
    eps_src: tuple[Fraction, ...]
    eps_dst: tuple[Fraction, ...]
    tight: bool
    checks: tuple[InequalityCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.checks)

    def failures(self, kind: str | None = None) -> list[InequalityCheck]:
        return [c for c in self.checks if not c.holds and (kind is None or c.kind == kind)]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "K": self.K,
            "tight": self.tight,
            "eps_src": [_q(e) for e in self.eps_src],
            "eps_dst": [_q(e) for e in self.eps_dst],
            "checks": [c.to_json() for c in self.checks],
        }


def bilipschitz_violation(f: PartialMap, K) -> tuple[int, int] | None:
    """First pair breaking ``d/K <= d' <= K*d``, or ``None``."""
    K = as_rat(K)
    pairs = f.pairs
    for i in range(len(pairs)):
        a1, b1 = pairs[i]
        for j in range(i + 1, len(pairs)):
            a2, b2 = pairs[j]
            dx, dy = f.source.d[a1][a2], f.target.d[b1][b2]
            if not (dx <= K * dy and dy <= K * dx):
                return a1, a2
    return None


def verify_transfer(src: ChainedSpace, dst: ChainedSpace, f: PartialMap, K: int) -> TransferReport:
    """Check the distance and drop-ratio transfer inequalities for ``f``.

    Preconditions: ``f`` is total on ``src`` points, sends ``src.beta`` to
    ``dst.beta``, sends each source stage into the matching target stage and
    satisfies ``d/K <= d' <= K*d``. Every stage gets a ``distance`` check
    ``eps/(2K) <= eps' <= K*eps`` and every consecutive pair a ``ratio``
    check with factor ``2K^2``. ``tight`` records whether every target stage
    is exactly the image of its source stage.
    """
    if f.source != src.space or f.target != dst.space:
        raise InputError("map spaces differ from the chained spaces")
    fmap = f.as_dict()
    if set(fmap) != set(range(len(src.space))):
        raise PreconditionError("map must be total on the source points")
    if len(src.chain) != len(dst.chain):
        raise PreconditionError("source and target chains have different lengths")
    if fmap[src.beta] != dst.beta:
        raise PreconditionError("map must send the source beta to the target beta")
    tight = True
    for n, (s, t) in enumerate(zip(src.chain, dst.chain)):
        image = {fmap[x] for x in s}
        if not image <= t:
            raise PreconditionError(f"chain stage {n} is not mapped into its target stage")
        tight = tight and image == t
    bad = bilipschitz_violation(f, K)
    if bad is not None:
        raise PreconditionError(f"map is not {K}-bi-Lipschitz at pair {bad}")

    eps, eps2 = epsilon_sequence(src), epsilon_sequence(dst)
    checks = [InequalityCheck("distance", n, e / (2 * K), e2, K * e) for n, (e, e2) in enumerate(zip(eps, eps2))]
    spread = 2 * K**2
    for n in range(len(eps) - 1):
        r, r2 = eps[n] / eps[n + 1], eps2[n] / eps2[n + 1]
        checks.append(InequalityCheck("ratio", n, r / spread, r2, r * spread))
    return TransferReport(K, tuple(eps), tuple(eps2), tight, tuple(checks))


@dataclass(frozen=True)
class Transfer:
    dst: ChainedSpace
    map: PartialMap


def random_transfer(src: ChainedSpace, K: int, seed: int, steps: int = 100) -> Transfer:
    """Seeded chain-respecting map with ``d/K <= d' <= K*d``.

    Each edge weight is ``d * r`` with ``r`` drawn on a ``1/steps`` grid of
    ``[1/K, K]``; the shortest-path closure stays within the same factor of
    ``d`` because ``d`` itself satisfies the triangle inequality. Points are
    then relabelled by a seeded permutation and the target chain is the image
    of the source chain.
    """
    rng = random.Random(seed)
    n = len(src.space)
    lo, hi = Fraction(1, K), Fraction(K)
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            r = lo + (hi - lo) * Fraction(rng.randint(0, steps), steps)
            edges[frozenset((i, j))] = src.space.d[i][j] * r
    warped = path_completion(WeightedGraph(n, edges))
    perm = list(range(n))
    rng.shuffle(perm)
    inv = {p: i for i, p in enumerate(perm)}
    rows = tuple(tuple(warped.d[inv[a]][inv[b]] for b in range(n)) for a in range(n))
    labels = tuple(src.space.labels[inv[a]] for a in range(n))
    space = FiniteMetricSpace(rows, labels)
    dst = ChainedSpace(space, tuple(frozenset(perm[x] for x in s) for s in src.chain), perm[src.beta])
    fmap = PartialMap(src.space, space, tuple((i, perm[i]) for i in range(n)))
    if bilipschitz_violation(fmap, K) is not None:
        raise AssertionError("generated map is not K-bi-Lipschitz")
    return Transfer(dst, fmap)
