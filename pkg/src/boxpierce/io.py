"""JSON instance/solution files, JSONL update scripts and CSV bench rows."""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .geom import Box, PiercingSolution, ProblemInstance, UsageError


class FormatError(UsageError):
    """Malformed file; ``line`` is 1-based when known."""

    def __init__(self, msg: str, line: int | None = None) -> None:
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
        self.line = line


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return float(x)
    if hasattr(x, "item"):
        return x.item()
    if isinstance(x, int) and not isinstance(x, bool) and x.bit_length() > 62:
        return float(x)
    return x


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":")) + "\n"


def instance_to_json(inst: ProblemInstance) -> dict:
    out = {"dimension": inst.dimension, "boxes": [b.to_json() for b in inst.boxes]}
    if inst.metadata:
        out["metadata"] = inst.metadata
    return out


def _coord(x, where: str):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FormatError(f"{where}: coordinate {x!r} is not a number")
    return x


def _box_from(obj, d: int | None, where: str) -> Box:
    if not isinstance(obj, dict) or "lo" not in obj or "hi" not in obj:
        raise FormatError(f"{where}: box needs 'lo' and 'hi'")
    lo = tuple(_coord(x, where) for x in obj["lo"])
    hi = tuple(_coord(x, where) for x in obj["hi"])
    if d is not None and (len(lo) != d or len(hi) != d):
        raise FormatError(f"{where}: box is not {d}-dimensional")
    try:
        return Box(lo, hi)
    except UsageError as e:
        raise FormatError(f"{where}: {e}") from None


def instance_from_json(obj: dict) -> ProblemInstance:
    if not isinstance(obj, dict) or "dimension" not in obj or "boxes" not in obj:
        raise FormatError("instance needs 'dimension' and 'boxes'")
    d = obj["dimension"]
    if not isinstance(d, int) or d < 1:
        raise FormatError("dimension must be a positive integer")
    boxes = [_box_from(b, d, f"box {i}") for i, b in enumerate(obj["boxes"])]
    return ProblemInstance(d, boxes, metadata=dict(obj.get("metadata", {})))


def solution_to_json(sol: PiercingSolution) -> dict:
    # timings vary run to run; keep them out so equal runs give equal files
    stats = {k: v for k, v in sol.stats.items() if "time" not in k}
    return {"points": [list(p) for p in sol.points], "algorithm": sol.algorithm, "seed": sol.seed, "stats": stats}


def solution_from_json(obj: dict) -> PiercingSolution:
    if not isinstance(obj, dict) or "points" not in obj:
        raise FormatError("solution needs 'points'")
    return PiercingSolution([tuple(p) for p in obj["points"]], obj.get("algorithm", ""), obj.get("seed", 0),
                            obj.get("stats", {}))


def read_instance(path) -> ProblemInstance:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: {e.msg}", e.lineno) from None
    return instance_from_json(obj)


def write_instance(inst: ProblemInstance, path) -> None:
    Path(path).write_text(dumps(instance_to_json(inst)))


def read_solution(path) -> PiercingSolution:
    return solution_from_json(json.loads(Path(path).read_text()))


def write_solution(sol: PiercingSolution, path) -> None:
    Path(path).write_text(dumps(solution_to_json(sol)))


def parse_script(lines: Iterable[str]) -> list:
    """``[(op, Box), ...]`` from JSONL text; blank lines are skipped."""
    out = []
    d = None
    for no, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise FormatError(e.msg, no) from None
        if not isinstance(obj, dict) or obj.get("op") not in ("insert", "delete") or "box" not in obj:
            raise FormatError("expected {\"op\": \"insert\"|\"delete\", \"box\": {...}}", no)
        try:
            b = _box_from(obj["box"], d, "box")
        except FormatError as e:
            raise FormatError(str(e), no) from None
        d = b.dim
        out.append((obj["op"], b))
    return out


def read_script(path) -> list:
    with open(path) as fh:
        return parse_script(fh)


def script_lines(script: Iterable) -> str:
    return "".join(dumps({"op": op, "box": b.to_json()}) for op, b in script)


def write_csv(rows: list, fh, fields: list | None = None) -> None:
    fields = fields or list(dict.fromkeys(k for r in rows for k in r))
    w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
