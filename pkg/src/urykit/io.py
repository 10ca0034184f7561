"""JSON files with every rational written as a canonical ``"num/den"`` string."""

from __future__ import annotations

import json
import re
import sys
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Any

from .chain import ChainedSpace
from .errors import InputError
from .metric import FiniteMetricSpace, PartialMap, WeightedGraph, check_shape

_RAT = re.compile(r"(-?)(0|[1-9][0-9]*)/([1-9][0-9]*)")


def format_rat(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_rat(text: Any, *, allow_negative: bool = False) -> Fraction:
    """Parse ``"p/q"`` in lowest terms; anything else is an :class:`InputError`."""
    if not isinstance(text, str):
        raise InputError(f"rational must be a 'num/den' string, got {text!r}")
    m = _RAT.fullmatch(text)
    if not m:
        raise InputError(f"malformed rational {text!r}; expected 'num/den'")
    sign, num, den = m.group(1), int(m.group(2)), int(m.group(3))
    if gcd(num, den) != 1:
        raise InputError(f"non-canonical rational {text!r}: not in lowest terms")
    if sign and (num == 0 or not allow_negative):
        raise InputError(f"rational {text!r} must not be negative")
    return Fraction(-num if sign else num, den)


def space_to_json(space: FiniteMetricSpace) -> dict:
    return {"labels": list(space.labels), "d": [[format_rat(x) for x in row] for row in space.d]}


def _require(doc: Any, key: str, where: str) -> Any:
    if not isinstance(doc, dict):
        raise InputError(f"{where}: expected a JSON object")
    if key not in doc:
        raise InputError(f"{where}: missing key {key!r}")
    return doc[key]


def space_from_json(doc: Any, where: str = "space") -> FiniteMetricSpace:
    rows = _require(doc, "d", where)
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError(f"{where}: 'd' must be a list of rows")
    labels = doc.get("labels")
    if labels is None:
        labels = [str(i) for i in range(len(rows))]
    if not isinstance(labels, list):
        raise InputError(f"{where}: 'labels' must be a list")
    space = FiniteMetricSpace(tuple(tuple(parse_rat(x) for x in r) for r in rows), tuple(labels))
    check_shape(space)
    for i in range(len(rows)):
        for j in range(i):
            if space.d[i][j] != space.d[j][i]:
                raise InputError(f"{where}: asymmetric matrix at ({j}, {i})")
    return space


def dumps(doc: Any) -> str:
    # factorial-transformed families hold integers with tens of thousands of digits
    limit = getattr(sys, "get_int_max_str_digits", None)
    if limit is None:
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    old = limit()
    sys.set_int_max_str_digits(0)
    try:
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    finally:
        sys.set_int_max_str_digits(old)


def load_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def write_json(doc: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def read_space(path: str | Path) -> FiniteMetricSpace:
    return space_from_json(load_json(path), str(path))


def write_space(space: FiniteMetricSpace, path: str | Path) -> None:
    write_json(space_to_json(space), path)


def graph_from_json(doc: Any, where: str = "graph") -> WeightedGraph:
    """``{"labels": [...], "edges": [[u, v, "w"], ...]}``; vertices are label positions."""
    labels = _require(doc, "labels", where)
    edges = _require(doc, "edges", where)
    out = []
    for e in edges:
        if not (isinstance(e, list) and len(e) == 3 and isinstance(e[0], int) and isinstance(e[1], int)):
            raise InputError(f"{where}: edge {e!r} must be [u, v, 'num/den']")
        out.append((e[0], e[1], parse_rat(e[2])))
    return WeightedGraph.from_edges(len(labels), out, labels)


def chained_to_json(cs: ChainedSpace) -> dict:
    doc = space_to_json(cs.space)
    doc.update(cs.to_json())
    return doc


def chained_from_json(doc: Any, where: str = "chained space") -> ChainedSpace:
    space = space_from_json(doc, where)
    chain = _require(doc, "chain", where)
    beta = _require(doc, "beta", where)
    if not isinstance(beta, int) or not isinstance(chain, list):
        raise InputError(f"{where}: 'chain' must be a list of index lists and 'beta' an integer")
    return ChainedSpace(space, tuple(frozenset(s) for s in chain), beta)


def read_chained(path: str | Path) -> ChainedSpace:
    return chained_from_json(load_json(path), str(path))


def pairs_from_json(doc: Any, where: str = "map") -> tuple[tuple[int, int], ...]:
    pairs = _require(doc, "pairs", where)
    if not all(isinstance(p, list) and len(p) == 2 and all(isinstance(v, int) for v in p) for p in pairs):
        raise InputError(f"{where}: 'pairs' must be a list of [source, target] index pairs")
    return tuple((a, b) for a, b in pairs)


def map_to_json(m: PartialMap) -> dict:
    return {"pairs": [list(p) for p in m.pairs]}


def type_from_json(doc: Any, where: str = "type") -> tuple[Fraction, ...]:
    return tuple(parse_rat(x) for x in _require(doc, "p", where))
