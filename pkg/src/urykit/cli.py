"""``urykit`` command line.

Exit codes: 0 when the property holds, 1 when it fails (the report carries
the counterexample), 2 on input, precondition or budget errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from . import backforth, cantor, chain, extension, metric, urysohn
from .errors import BudgetError, InputError, PreconditionError
from .io import (
    chained_to_json,
    dumps,
    format_rat,
    graph_from_json,
    load_json,
    map_to_json,
    pairs_from_json,
    parse_rat,
    read_chained,
    read_space,
    space_to_json,
    type_from_json,
    write_json,
    write_space,
)

OK, FAIL, BAD_INPUT = 0, 1, 2


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # route argparse failures through the JSON error path
        raise UsageError(message)


def _rat(text: str) -> Fraction:
    return parse_rat(text if "/" in text else f"{text}/1")


def _ints(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _q(x) -> str:
    return format_rat(x) if isinstance(x, Fraction) else "INFINITE"


def _emit(doc: dict, out: Path | None = None) -> None:
    if out is not None:
        write_json(doc, out)
    sys.stdout.write(dumps(doc))


# -- metric core -------------------------------------------------------------


def cmd_validate(args) -> int:
    report = metric.validate_metric(read_space(args.space))
    _emit(report.to_json())
    return OK if report.ok else FAIL


def cmd_complete(args) -> int:
    space = metric.path_completion(graph_from_json(load_json(args.graph), args.graph))
    if args.out:
        write_space(space, args.out)
    _emit(space_to_json(space))
    return OK


def cmd_spectrum(args) -> int:
    space = read_space(args.space)
    _emit({"spectrum": [_q(s) for s in metric.spectrum(space)], "ultrametric": metric.is_ultrametric(space)})
    return OK


def cmd_extend(args) -> int:
    x = read_space(args.x_space)
    y = read_space(args.y_space)
    m = metric.PartialMap(x, y, pairs_from_json(load_json(args.map), args.map))
    ext = extension.extend_one_point(x, m, args.theta)
    if args.out:
        write_space(ext.target, args.out)
    _emit(
        {
            "lambda": _q(ext.lam),
            "distortion": _q(metric.distortion(ext.map)),
            "theta": _q(args.theta),
            "map": map_to_json(ext.map),
            "target": space_to_json(ext.target),
        }
    )
    return OK


def cmd_realize(args) -> int:
    space = read_space(args.space)
    t = extension.MetricType(space, type_from_json(load_json(args.type), args.type))
    grown = extension.realize_type(space, t)
    if args.out:
        write_space(grown, args.out)
    _emit(space_to_json(grown))
    return OK


# -- urysohn -----------------------------------------------------------------


def cmd_urysohn_build(args) -> int:
    levels = urysohn.build_levels(args.levels, args.budget, args.sample, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n, level in enumerate(levels.levels):
        write_space(level, out / f"A{n}.json")
    _emit({"sizes": [len(a) for a in levels.levels], "faithful": list(levels.faithful), "dir": str(out)})
    return OK


def cmd_urysohn_check(args) -> int:
    d = Path(args.dir)
    chain_ = tuple(read_space(d / f"A{k}.json") for k in range(args.n + 2))
    for k in range(args.n + 1):
        if not urysohn.is_prefix(chain_[k], chain_[k + 1]):
            raise InputError(f"A{k} is not an initial segment of A{k + 1}")
    missing = urysohn.check_level_property(urysohn.UrysohnLevels(chain_), args.n)
    if missing is None:
        _emit({"ok": True, "n": args.n})
        return OK
    _emit({"ok": False, "n": args.n, "unrealized_type": [_q(v) for v in missing]})
    return FAIL


# -- back and forth ----------------------------------------------------------


def cmd_match(args) -> int:
    X, Y = read_space(args.x_space), read_space(args.y_space)
    plan = backforth.MatchPlan(args.lam, args.points)
    result = backforth.almost_isometry(X, Y, plan)
    if isinstance(result, backforth.MatchFailure):
        _emit(
            {
                "ok": False,
                "lambda": _q(plan.lam),
                "failure": {"step": result.step, "side": result.side, "point": result.point, "reason": result.reason},
            }
        )
        return FAIL
    _emit({"ok": True, "lambda": _q(plan.lam), "pairs": [list(p) for p in result.pairs], "distortion": _q(metric.distortion(result))})
    return OK


# -- cantor ------------------------------------------------------------------


def cmd_cantor_build(args) -> int:
    bs = cantor.branch_space(args.A, args.depth, args.base, args.budget)
    if args.out:
        write_space(bs.space, args.out)
    _emit(
        {
            "A": sorted(bs.A),
            "depth": bs.depth,
            "base": bs.base,
            "points": len(bs.branches),
            "spectrum": [_q(s) for s in metric.spectrum(bs.space)],
            "ultrametric": metric.is_ultrametric(bs.space),
        }
    )
    return OK


def cmd_cantor_certify(args) -> int:
    cert = cantor.incomparability_certificate(args.A, args.B, args.n, args.base, args.depth, args.budget)
    _emit(cert.to_json())
    return OK if cert and cert.verified else FAIL


def cmd_cantor_family(args) -> int:
    fam = cantor.ad_family(args.count, args.bound, args.seed)
    if args.transform != "raw":
        fam = fam.transformed(args.transform)
    _emit(fam.to_json())
    return OK


def cmd_cantor_gap(args) -> int:
    A, B = args.A, args.B
    if args.transform != "raw":
        A, B = cantor.gap_transform(A, args.transform), cantor.gap_transform(B, args.transform)
    k = cantor.check_gap_condition(A, B, args.n, args.form, args.search_bound)
    _emit({"form": args.form, "n": args.n, "transform": args.transform, "k": k, "found": k is not None})
    return OK if k is not None else FAIL


# -- chain -------------------------------------------------------------------


def cmd_chain_encode(args) -> int:
    cs = chain.encode_set(args.A, args.K, args.gap, args.m)
    doc = chained_to_json(cs)
    if args.out:
        write_json(doc, args.out)
    eps = chain.epsilon_sequence(cs)
    _emit({"eps": [_q(e) for e in eps], "ratios": [_q(r) for r in chain.ratios(eps)], "space": doc})
    return OK


def cmd_chain_decode(args) -> int:
    cs = read_chained(args.space)
    eps = chain.epsilon_sequence(cs)
    decoded = chain.decode_set(cs, args.K, args.mode)
    strict, _ = chain.theta_check(eps, args.K)
    _emit({"mode": args.mode, "K": args.K, "A": sorted(decoded), "eps": [_q(e) for e in eps], "strict_form": strict})
    return OK


def cmd_chain_verify(args) -> int:
    src, dst = read_chained(args.src), read_chained(args.dst)
    f = metric.PartialMap(src.space, dst.space, pairs_from_json(load_json(args.map), args.map))
    report = chain.verify_transfer(src, dst, f, args.K)
    _emit(report.to_json())
    return OK if report.ok else FAIL


def cmd_chain_perturb(args) -> int:
    src = read_chained(args.src)
    tr = chain.random_transfer(src, args.K, args.seed)
    write_json(chained_to_json(tr.dst), args.out_space)
    write_json(map_to_json(tr.map), args.out_map)
    _emit({"K": args.K, "seed": args.seed, "space": args.out_space, "map": args.out_map})
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="urykit", description="Exact finite metric geometry toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, fn: Callable, parent=sub, **kw) -> argparse.ArgumentParser:
        sp = parent.add_parser(name, **kw)
        sp.set_defaults(func=fn)
        return sp

    sp = add("validate", cmd_validate, help="check the metric axioms of a space file")
    sp.add_argument("space")

    sp = add("complete", cmd_complete, help="shortest-path metric of a weighted graph")
    sp.add_argument("graph")
    sp.add_argument("--out")

    sp = add("spectrum", cmd_spectrum, help="sorted distance set of a space")
    sp.add_argument("space")

    sp = add("extend", cmd_extend, help="extend a bi-Lipschitz map by the last point of X")
    sp.add_argument("x_space")
    sp.add_argument("y_space")
    sp.add_argument("map")
    sp.add_argument("--theta", type=_rat, default=Fraction(2))
    sp.add_argument("--out")

    sp = add("realize", cmd_realize, help="add a point realizing a metric type")
    sp.add_argument("space")
    sp.add_argument("type")
    sp.add_argument("--out")

    ury = sub.add_parser("urysohn", help="rational Urysohn levels").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = add("build", cmd_urysohn_build, ury)
    sp.add_argument("--levels", type=int, required=True)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--sample", type=int, help="seeded subset of types when a faithful level exceeds the budget")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="urysohn-levels")
    sp = add("check", cmd_urysohn_check, ury)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--dir", default="urysohn-levels")

    sp = add("match", cmd_match, help="back-and-forth bi-Lipschitz matching")
    sp.add_argument("x_space")
    sp.add_argument("y_space")
    sp.add_argument("--lambda", dest="lam", type=_rat, required=True)
    sp.add_argument("--points", type=int, default=20)

    can = sub.add_parser("cantor", help="Cantor-tree spaces and certificates").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = add("build", cmd_cantor_build, can)
    sp.add_argument("--A", type=_ints, required=True)
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--base", type=int, default=2)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--out")
    sp = add("certify", cmd_cantor_certify, can)
    sp.add_argument("--A", type=_ints, required=True)
    sp.add_argument("--B", type=_ints, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--depth", type=int, default=64)
    sp.add_argument("--base", type=int, default=2)
    sp.add_argument("--budget", type=int)
    sp = add("family", cmd_cantor_family, can)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--bound", type=int, default=10**6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--transform", choices=["raw", "square", "factorial"], default="raw")
    sp = add("gap", cmd_cantor_gap, can)
    sp.add_argument("--A", type=_ints, required=True)
    sp.add_argument("--B", type=_ints, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--form", choices=["ratio", "difference"], default="difference")
    sp.add_argument("--transform", choices=["raw", "square", "factorial"], default="raw")
    sp.add_argument("--search-bound", type=int)

    ch = sub.add_parser("chain", help="chain ratio profiles").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = add("encode", cmd_chain_encode, ch)
    sp.add_argument("--A", type=_ints, required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--gap", type=_rat)
    sp.add_argument("--m", type=int)
    sp.add_argument("--out")
    sp = add("decode", cmd_chain_decode, ch)
    sp.add_argument("space")
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--mode", choices=["source", "image"], default="source")
    sp = add("verify", cmd_chain_verify, ch)
    sp.add_argument("src")
    sp.add_argument("dst")
    sp.add_argument("map")
    sp.add_argument("--K", type=int, required=True)
    sp = add("perturb", cmd_chain_perturb, ch, help="seeded chain-respecting K-bi-Lipschitz copy")
    sp.add_argument("src")
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-space", required=True)
    sp.add_argument("--out-map", required=True)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (InputError, PreconditionError, BudgetError) as exc:
        sys.stdout.write(dumps({"error": type(exc).__name__, "message": str(exc)}))
        return BAD_INPUT
    except argparse.ArgumentTypeError as exc:
        sys.stdout.write(dumps({"error": "UsageError", "message": str(exc)}))
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
