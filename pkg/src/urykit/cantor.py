"""Truncated Cantor-tree spaces D_A and bi-Lipschitz incomparability certificates.

A branch of the tree T_A may take bit 1 only at levels in A. Two branches
first differing at level ``a`` are at distance ``base**-a``, so the distances
of D_A are exactly ``{base**-a : a in A}``. Distance ratios between D_A and
D_B are powers ``base**(a - b)``; large exponent gaps rule out bi-Lipschitz
maps at small scales.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .budget import point_budget
from .errors import BudgetError, InputError
from .metric import FiniteMetricSpace, PartialMap, distortion

MAX_FACTORIAL_ARG = 5000


@dataclass(frozen=True)
class BranchSpace:
    A: frozenset[int]
    depth: int
    base: int
    branches: tuple[str, ...]
    space: FiniteMetricSpace

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(sorted(a for a in self.A if a < self.depth))


def _levels(A: Iterable[int], depth: int) -> list[int]:
    return sorted({int(a) for a in A if 0 <= int(a) < depth})


def branch_space(A: Iterable[int], depth: int, base: int = 2, budget: int | None = None) -> BranchSpace:
    A = frozenset(int(a) for a in A)
    if any(a < 0 for a in A):
        raise InputError("branching levels must be nonnegative")
    if base < 2 or depth < 1:
        raise InputError("need base >= 2 and depth >= 1")
    levels = _levels(A, depth)
    k = len(levels)
    limit = point_budget(budget)
    if 2**k > limit:
        raise BudgetError(f"D_A at depth {depth} has 2**{k} points, budget {limit}")
    scale = [Fraction(1, base**a) for a in levels]
    zero = Fraction(0)
    codes = range(2**k)
    # code bit (k-1-i) is the bit at branching level levels[i]; numeric order is lexicographic
    rows = []
    for x in codes:
        row = []
        for y in codes:
            diff = x ^ y
            row.append(zero if not diff else scale[k - diff.bit_length()])
        rows.append(tuple(row))
    branches = []
    for x in codes:
        bits = ["0"] * depth
        for i, lvl in enumerate(levels):
            if x >> (k - 1 - i) & 1:
                bits[lvl] = "1"
        branches.append("".join(bits))
    space = FiniteMetricSpace(tuple(rows), tuple(branches))
    return BranchSpace(A, depth, base, tuple(branches), space)


class GapForm(str, enum.Enum):
    RATIO = "ratio"
    DIFFERENCE = "difference"


def _far(a: int, b: int, n: int, form: GapForm) -> bool:
    if form is GapForm.RATIO:
        return a > n * b or b > n * a
    return abs(a - b) > n


def check_gap_condition(
    A: Iterable[int], B: Iterable[int], n: int, form: GapForm | str = GapForm.DIFFERENCE, search_bound: int | None = None
) -> int | None:
    """Least ``k`` such that all ``a in A, b in B`` above ``k`` are far apart.

    "Far" means ``a/b > n or b/a > n`` (RATIO) or ``|a - b| > n`` (DIFFERENCE).
    Returns ``None`` when the least such ``k`` exceeds ``search_bound``. The
    default bound ``min(max A, max B) - 1`` keeps at least one element of each
    set above ``k``, so a found ``k`` is never vacuous.
    """
    form = GapForm(form)
    A, B = sorted(set(A)), sorted(set(B))
    if not A or not B:
        raise InputError("both sets must be nonempty")
    if n < 1:
        raise InputError("n must be at least 1")
    bound = min(A[-1], B[-1]) - 1 if search_bound is None else search_bound
    k = 0
    for a in A:
        for b in B:
            if not _far(a, b, n, form):
                k = max(k, min(a, b))
    return k if k <= bound else None


class GapKind(str, enum.Enum):
    SQUARE = "square"
    FACTORIAL = "factorial"


def gap_transform(A: Iterable[int], kind: GapKind | str) -> frozenset[int]:
    kind = GapKind(kind)
    A = [int(a) for a in A]
    if kind is GapKind.SQUARE:
        return frozenset(a * a for a in A)
    big = [a for a in A if a > MAX_FACTORIAL_ARG]
    if big:
        raise BudgetError(f"factorial of {max(big)} exceeds the magnitude budget ({MAX_FACTORIAL_ARG}!)")
    return frozenset(math.factorial(a) for a in A)


@dataclass(frozen=True)
class GapFamily:
    members: tuple[frozenset[int], ...]
    transform: str = "raw"
    intersections: dict[tuple[int, int], frozenset[int]] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not self.intersections:
            table = {(i, j): self.members[i] & self.members[j] for i, j in combinations(range(len(self.members)), 2)}
            object.__setattr__(self, "intersections", table)

    def transformed(self, kind: GapKind | str) -> GapFamily:
        kind = GapKind(kind)
        return GapFamily(tuple(gap_transform(m, kind) for m in self.members), kind.value)

    def to_json(self) -> dict:
        return {
            "transform": self.transform,
            "members": [sorted(m) for m in self.members],
            "intersections": [
                {"pair": [i, j], "common": sorted(s)} for (i, j), s in sorted(self.intersections.items())
            ],
        }


def ad_family(count: int, element_bound: int, seed: int = 0) -> GapFamily:
    """``count`` almost disjoint sets coded from seeded binary branches.

    Member ``i`` is ``{code(s) : s a nonempty prefix of branch i}`` with
    ``code(s) = int("1" + s, 2)``; the codes of distinct strings differ, so
    two members share exactly the codes of the common prefixes of their
    branches. Only codes ``<= element_bound`` are kept.
    """
    if count < 2:
        raise InputError("an almost disjoint family needs at least two members")
    depth = element_bound.bit_length() - 1
    if depth < 1:
        raise InputError("element bound too small to hold any code")
    rng = random.Random(seed)
    members = []
    for _ in range(count):
        bits = format(rng.getrandbits(depth), f"0{depth}b")
        codes = frozenset(c for L in range(1, depth + 1) if (c := int("1" + bits[:L], 2)) <= element_bound)
        members.append(codes)
    if len(set(members)) != len(members):
        raise InputError("two members coincide below the element bound; change the seed or raise the bound")
    return GapFamily(tuple(members))


@dataclass(frozen=True)
class IncomparabilityCertificate:
    A: tuple[int, ...]
    B: tuple[int, ...]
    n: int
    base: int
    depth: int
    k: int
    small_pairs: int
    target_pairs: int
    verified: bool

    @property
    def threshold(self) -> Fraction:
        return Fraction(1, self.base**self.k)

    def to_json(self) -> dict:
        return {
            "status": "certified",
            "A": list(self.A),
            "B": list(self.B),
            "n": self.n,
            "base": self.base,
            "depth": self.depth,
            "k": self.k,
            "threshold": f"{self.threshold.numerator}/{self.threshold.denominator}",
            "small_pairs": self.small_pairs,
            "target_pairs": self.target_pairs,
            "verified": self.verified,
        }


@dataclass(frozen=True)
class Refuted:
    A: tuple[int, ...]
    B: tuple[int, ...]
    n: int
    base: int
    depth: int
    witness: tuple[int, int] | None

    def __bool__(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {
            "status": "refuted",
            "A": list(self.A),
            "B": list(self.B),
            "n": self.n,
            "base": self.base,
            "depth": self.depth,
            "witness_levels": list(self.witness) if self.witness else None,
        }


def _compatible(a: int, b: int, n: int, base: int) -> bool:
    # distance ratio between levels a and b is base**|a-b|
    return base ** abs(a - b) <= n


def incomparability_certificate(
    A: Iterable[int], B: Iterable[int], n: int, base: int = 2, depth: int = 64, budget: int | None = None
) -> IncomparabilityCertificate | Refuted:
    """Certify that small distances of D_A are ratio-incompatible with all of D_B.

    ``k`` is the least level such that every D_A distance ``<= base**-k`` is
    off from every D_B distance by a factor above ``n``. The claim is then
    re-checked over all point pairs of both truncated spaces: every pair of
    D_A at distance ``<= base**-k`` against every pair of D_B.
    """
    if n < 2:
        raise InputError("n must be at least 2")
    la, lb = _levels(A, depth), _levels(B, depth)
    fields = (tuple(la), tuple(lb), n, base, depth)
    bad = [(a, b) for a in la for b in lb if _compatible(a, b, n, base)]
    k = max(a for a, _ in bad) + 1 if bad else 0
    if not any(a >= k for a in la):
        return Refuted(*fields, bad[-1] if bad else None)

    da = branch_space(la, depth, base, budget).space
    db = branch_space(lb, depth, base, budget).space
    cut = Fraction(1, base**k)
    small = [da.d[i][j] for i, j in combinations(range(len(da)), 2) if da.d[i][j] <= cut]
    target = [db.d[i][j] for i, j in combinations(range(len(db)), 2)]
    ok = all(t > n * s or n * t < s for s in small for t in target)
    return IncomparabilityCertificate(*fields, k, len(small), len(target), ok)


@dataclass(frozen=True)
class LineEmbedding:
    points: tuple[Fraction, ...]
    line: FiniteMetricSpace
    distortion: Fraction


def embed_cantor_into_line(bs: BranchSpace) -> LineEmbedding:
    """Send branch ``e`` to ``sum 2*e_i / 3**(i+1)`` in the middle-third Cantor set."""
    if bs.base != 3:
        raise InputError("the line embedding is bi-Lipschitz only for base 3")
    pts = tuple(sum((Fraction(2, 3 ** (i + 1)) for i, c in enumerate(b) if c == "1"), Fraction(0)) for b in bs.branches)
    line = FiniteMetricSpace(tuple(tuple(abs(p - q) for q in pts) for p in pts), bs.branches)
    m = PartialMap(bs.space, line, tuple((i, i) for i in range(len(pts))))
    return LineEmbedding(pts, line, distortion(m))
