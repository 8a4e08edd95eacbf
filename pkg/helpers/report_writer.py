"""JSON reports on stdout and golden-file comparison for the corpus runner."""
import json
import logging
import sys
from pathlib import Path
from typing import List

from helpers.exact_algebra import NEG_INF, Polynomial

logger = logging.getLogger(__name__)


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(v) for v in k)
    return str(k)


def to_jsonable(value):
    """Plain JSON values; tuples become lists, tuple keys become "1,0" strings, -inf becomes "-inf"."""
    if isinstance(value, dict):
        return {_key(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if value == NEG_INF:
            return "-inf"
        return value
    if isinstance(value, Polynomial):
        return str(value)
    if getattr(value, "is_Integer", False):
        return int(value)
    return str(value)


def emit_report(report: dict, stream=None) -> None:
    stream = sys.stdout if stream is None else stream
    json.dump(to_jsonable(report), stream, indent=2)
    stream.write("\n")
    stream.flush()


def load_expected(path) -> dict:
    logger.debug(f"Loading golden report {path}")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def compare_subset(expected, actual, path: str = "$") -> List[str]:
    """Differences where ``actual`` does not contain ``expected``; dict keys absent from expected are ignored."""
    if isinstance(expected, dict):
        if not isinstance(actual, dict):
            return [f"{path}: expected an object, got {actual!r}"]
        out = []
        for key, value in expected.items():
            if key not in actual:
                out.append(f"{path}.{key}: missing")
            else:
                out.extend(compare_subset(value, actual[key], f"{path}.{key}"))
        return out
    if isinstance(expected, list):
        if not isinstance(actual, list) or len(actual) != len(expected):
            return [f"{path}: expected {len(expected)} items, got {actual!r}"]
        out = []
        for i, (e, a) in enumerate(zip(expected, actual)):
            out.extend(compare_subset(e, a, f"{path}[{i}]"))
        return out
    if expected != actual:
        return [f"{path}: expected {expected!r}, got {actual!r}"]
    return []


def golden_path(problem_path) -> Path:
    p = Path(problem_path)
    return p.with_name(p.stem + ".expected.json")
