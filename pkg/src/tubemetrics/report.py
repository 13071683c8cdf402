"""CSV / JSON report emission with round-trip-exact float formatting."""

from __future__ import annotations

import json
import math
import sys
from typing import IO, Dict, List, Optional, Sequence


def format_value(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.17g}"
    return str(v)


def write_csv(rows: List[Dict], columns: Sequence[str], out: IO[str]) -> None:
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(format_value(row.get(c, "")) for c in columns) + "\n")


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, float) and math.isnan(obj):
        return None
    return obj


def write_json(rows: List[Dict], summary: Dict, out: IO[str]) -> None:
    json.dump(_jsonify({"rows": rows, "summary": summary}), out, indent=2, sort_keys=True)
    out.write("\n")


def emit(rows, summary, columns, fmt: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        _write(rows, summary, columns, fmt, sys.stdout)
    else:
        with open(path, "w", newline="") as fh:
            _write(rows, summary, columns, fmt, fh)


def _write(rows, summary, columns, fmt, fh):
    if fmt == "csv":
        write_csv(rows, columns, fh)
    elif fmt == "json":
        write_json(rows, summary, fh)
    else:
        raise ValueError(f"unknown format '{fmt}'")
