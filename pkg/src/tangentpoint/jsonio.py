"""Deterministic JSON and CSV output with 17 significant digits."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

__all__ = ["dumps", "to_plain", "format_float", "write_csv"]


def format_float(x: float) -> str:
    return "%.17g" % x


def to_plain(obj):
    """Convert numpy scalars/arrays and non-finite floats to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (frozenset, set)):
        return sorted(to_plain(v) for v in obj)
    return obj


def dumps(obj, indent=None) -> str:
    """JSON text with every float written as ``%.17g``; NaN and inf become null."""
    return _encode(to_plain(obj), indent)


def _encode(obj, indent, level=0) -> str:
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ", " if indent is None else ","
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[" + sep.join(items) + end + "]"
    if isinstance(obj, float):
        return format_float(obj)
    return json.dumps(obj)


def write_csv(rows, fieldnames) -> str:
    """RFC 4180 CSV text; floats use 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(fieldnames)
    for row in rows:
        out = []
        for name in fieldnames:
            v = row.get(name, "")
            if isinstance(v, (float, np.floating)):
                v = format_float(float(v))
            elif isinstance(v, (list, tuple, frozenset, set)):
                v = ";".join(str(x) for x in v)
            out.append(v)
        w.writerow(out)
    return buf.getvalue()
