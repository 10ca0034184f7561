"""The ten acceptance criteria, each timed against its runtime limit.

Every test prints one ``[PASS]`` or ``[FAIL]`` line; the lines are repeated in
the "acceptance criteria" section of the pytest summary.
"""

from __future__ import annotations

import json
import random
import time
from contextlib import contextmanager
from fractions import Fraction as F
from itertools import product

from conftest import ACCEPTANCE_LINES
from oracles import all_simple_paths_metric, extension_instance, random_graph
from urykit import PartialMap, distortion, is_ultrametric, path_completion, spectrum, validate_metric
from urykit.backforth import MatchPlan, almost_isometry, certify_bilip
from urykit.cantor import (
    GapForm,
    GapKind,
    IncomparabilityCertificate,
    Refuted,
    branch_space,
    check_gap_condition,
    gap_transform,
    incomparability_certificate,
)
from urykit.chain import DecodeMode, decode_set, encode_set, epsilon_sequence, random_transfer, verify_transfer
from urykit.cli import main
from urykit.extension import extend_one_point
from urykit.io import chained_from_json, chained_to_json, format_rat, read_space, write_json, write_space
from urykit.urysohn import UrysohnLevels, build_level, check_level_property


class Outcome:
    def __init__(self) -> None:
        self.ok = True
        self.notes: list[str] = []

    def check(self, cond: bool, note: str) -> None:
        if not cond:
            self.ok = False
            self.notes.append(note)


@contextmanager
def criterion(number: int, title: str, limit: float):
    out = Outcome()
    start = time.perf_counter()
    try:
        yield out
    except Exception as exc:  # an exception is a failed criterion, reported like any other
        out.check(False, f"{type(exc).__name__}: {exc}")
    elapsed = time.perf_counter() - start
    out.check(elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s")
    tag = "PASS" if out.ok else "FAIL"
    line = f"[{tag}] criterion {number}: {title} ({elapsed:.2f}s < {limit}s)"
    if out.notes:
        line += " -- " + "; ".join(out.notes[:3])
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert out.ok, line


def test_criterion_01_path_completion_oracle():
    with criterion(1, "path completion equals the all-simple-paths oracle on 200 graphs", 10) as c:
        rng = random.Random(20240101)
        for trial in range(200):
            g = random_graph(rng, rng.randint(2, 8))
            got = [list(r) for r in path_completion(g).d]
            c.check(got == all_simple_paths_metric(g), f"graph {trial} differs")


def test_criterion_02_one_point_extension():
    with criterion(2, "one-point extension on 200 instances", 10) as c:
        rng = random.Random(7)
        thetas = (F(3, 2), F(2), F(11, 10))
        for trial in range(200):
            theta = thetas[trial % 3]
            x, m = extension_instance(rng, theta)
            c.check(distortion(m) < theta, f"instance {trial} violates its precondition")
            ext = extend_one_point(x, m, theta)
            t = len(m.target)
            c.check(ext.target.subspace(range(t)) == m.target, f"instance {trial} changed the old metric")
            c.check(validate_metric(ext.target).ok, f"instance {trial} is not a metric")
            c.check(distortion(ext.map) < theta, f"instance {trial} distortion {distortion(ext.map)}")


def test_criterion_03_urysohn_levels():
    with criterion(3, "Urysohn levels A1 (2 points, d=1) and A2 (16 points)", 30) as c:
        levels = build_level(build_level(UrysohnLevels.singleton()))
        c.check(len(levels[1]) == 2 and levels[1].d[0][1] == 1, "A1 wrong")
        c.check(len(levels[2]) == 16, f"|A2| = {len(levels[2])}")
        c.check(all(levels.faithful), "levels not faithful")
        for n in (0, 1):
            c.check(check_level_property(levels, n) is None, f"level property fails at n={n}")
        c.check(all(validate_metric(a).ok for a in levels.levels), "a level fails validation")


def test_criterion_04_back_and_forth():
    with criterion(4, "back-and-forth between A2 and its 9/10 copy for lambda in {2, 3/2, 5/4}", 30) as c:
        levels = build_level(build_level(UrysohnLevels.singleton()))
        a2 = levels[2]
        b2 = a2.scaled(F(9, 10))
        for lam in (F(2), F(3, 2), F(5, 4)):
            m = almost_isometry(a2, b2, MatchPlan(lam, 16))
            c.check(isinstance(m, PartialMap), f"lambda {lam}: {m}")
            if isinstance(m, PartialMap):
                c.check(len(m.pairs) >= 8, f"lambda {lam}: only {len(m.pairs)} points")
                c.check(certify_bilip(m, lam) is None, f"lambda {lam}: certificate rejected")
        ident = almost_isometry(a2, a2, MatchPlan(F(5, 4), 16))
        c.check(isinstance(ident, PartialMap) and distortion(ident) == 1, "identity distortion is not 1")


def test_criterion_05_cantor_spectra():
    with criterion(5, "Cantor spectra on 50 seeded (A, N)", 10) as c:
        rng = random.Random(5)
        for trial in range(50):
            N = rng.randint(1, 20)
            # at most 6 branching levels keeps D_A at 64 points
            A = set(rng.sample(range(25), rng.randint(0, 6)))
            bs = branch_space(A, N, 2)
            want = sorted(F(1, 2**a) for a in A if a < N)
            c.check(spectrum(bs.space) == want, f"trial {trial}: spectrum differs")
            c.check(is_ultrametric(bs.space), f"trial {trial}: not ultrametric")


def test_criterion_06_incomparability():
    with criterion(6, "incomparability certificate for even vs odd squares, refutation for A = B", 20) as c:
        A = [k * k for k in range(0, 8, 2) if k * k < 64]
        B = [k * k for k in range(1, 8, 2) if k * k < 64]
        cert = incomparability_certificate(A, B, 10, depth=64)
        c.check(isinstance(cert, IncomparabilityCertificate), f"got {cert}")
        c.check(bool(cert) and cert.verified, "exhaustive cross-ratio check failed")
        c.check(isinstance(incomparability_certificate(A, A, 10, depth=64), Refuted), "A = B not refuted")


def test_criterion_07_gap_audit():
    with criterion(7, "gap-condition audit by exhaustive scan", 10) as c:
        evens, odds = range(0, 21, 2), range(1, 21, 2)
        sq_e, sq_o = gap_transform(evens, GapKind.SQUARE), gap_transform(odds, GapKind.SQUARE)
        c.check(check_gap_condition(sq_e, sq_o, 2, GapForm.RATIO) is None, "RATIO n=2 on squares found a k")
        c.check(check_gap_condition(sq_e, sq_o, 5, GapForm.DIFFERENCE) is not None, "DIFFERENCE n=5 on squares failed")
        f_e, f_o = gap_transform(evens, GapKind.FACTORIAL), gap_transform(odds, GapKind.FACTORIAL)
        c.check(check_gap_condition(f_e, f_o, 5, GapForm.RATIO) is not None, "RATIO n=5 on factorials failed")


def test_criterion_08_chain_roundtrip():
    with criterion(8, "chain coding roundtrip on all 256 subsets of 0..7, K in {1, 2}", 60) as c:
        for K in (1, 2):
            for bits in product((0, 1), repeat=8):
                A = frozenset(i for i, b in enumerate(bits) if b)
                cs = encode_set(A, K, 16 * K**6)
                c.check(decode_set(cs, K, DecodeMode.SOURCE) == A, f"K={K} A={sorted(A)} decodes wrongly")
                c.check(is_ultrametric(cs.space), f"K={K} A={sorted(A)} not ultrametric")
                eps = epsilon_sequence(cs)
                c.check(all(e > 0 for e in eps), f"K={K} A={sorted(A)} nonpositive eps")
                c.check(all(a >= b for a, b in zip(eps, eps[1:])), f"K={K} A={sorted(A)} eps increases")


def test_criterion_09_transfer():
    with criterion(9, "transfer inequalities on 100 seeded K-bi-Lipschitz maps", 60) as c:
        rng = random.Random(9)
        for trial in range(100):
            K = 1 + trial % 3
            A = frozenset(a for a in range(8) if rng.random() < 0.5)
            src = encode_set(A, K, 16 * K**6)
            t = random_transfer(src, K, seed=trial)
            report = verify_transfer(src, t.dst, t.map, K)
            c.check(report.tight, f"trial {trial}: map is not tight")
            c.check(not report.failures("ratio"), f"trial {trial}: ratio inequality fails")
            c.check(not report.failures("distance"), f"trial {trial}: distance inequality fails")
            c.check(decode_set(t.dst, K, DecodeMode.IMAGE) == A, f"trial {trial}: image decode differs")


def _pipeline(capsys, root) -> dict[str, str]:
    root.mkdir(parents=True)
    outputs = []

    def go(*argv):
        main([str(a) for a in argv])
        outputs.append(capsys.readouterr().out.replace(str(root), "<root>"))

    go("urysohn", "build", "--levels", 2, "--out", root / "levels")
    go("urysohn", "check", "--n", 1, "--dir", root / "levels")
    a2 = read_space(root / "levels" / "A2.json")
    edges = [[i, j, format_rat(a2.d[i][j])] for i in range(len(a2)) for j in range(i + 1, len(a2))]
    write_json({"labels": list(a2.labels), "edges": edges}, root / "a2-graph.json")
    go("complete", root / "a2-graph.json", "--out", root / "a2-closed.json")
    go("cantor", "build", "--A", "0,4,16,36", "--depth", 64, "--out", root / "cantor.json")
    go("cantor", "certify", "--A", "0,4,16,36", "--B", "1,9,25,49", "--n", 10)
    go("cantor", "family", "--count", 6, "--bound", 1000, "--seed", 4, "--transform", "square")
    go("chain", "encode", "--A", "0,3,5", "--K", 2, "--out", root / "enc.json")
    go("chain", "perturb", root / "enc.json", "--K", 2, "--seed", 11, "--out-space", root / "img.json", "--out-map", root / "map.json")
    go("chain", "verify", root / "enc.json", root / "img.json", root / "map.json", "--K", 2)
    go("chain", "decode", root / "img.json", "--K", 2, "--mode", "image")
    go("match", root / "levels" / "A2.json", root / "levels" / "A1.json", "--lambda", "3/2", "--points", 2)
    files = {str(p.relative_to(root)): p.read_text() for p in sorted(root.rglob("*.json"))}
    files["<stdout>"] = "".join(outputs)
    return files


def test_criterion_10_cli_determinism(capsys, tmp_path):
    with criterion(10, "CLI artifacts reread identically; repeated runs are byte-identical", 5) as c:
        first = _pipeline(capsys, tmp_path / "one")
        second = _pipeline(capsys, tmp_path / "two")
        c.check(first == second, "two runs differ")
        root = tmp_path / "one"
        for path in sorted((root / "levels").glob("A*.json")) + [root / "cantor.json", root / "a2-closed.json"]:
            write_space(read_space(path), tmp_path / "copy.json")
            c.check((tmp_path / "copy.json").read_text() == path.read_text(), f"{path.name} changes on rewrite")
        for name in ("enc.json", "img.json"):
            doc = json.loads((root / name).read_text())
            c.check(chained_to_json(chained_from_json(doc)) == doc, f"{name} changes on rewrite")

