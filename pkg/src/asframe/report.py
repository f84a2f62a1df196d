"""Byte-stable report serialization.

Floats are written with 17 significant digits and keys in insertion order,
so equal inputs give identical bytes. Complex numbers become ``[re, im]``.
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

__all__ = ["format_float", "dumps", "write_csv"]


def format_float(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if "." not in s and "e" not in s:
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        # leaf rows of numbers stay on one line
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj) or _is_number_pairs(obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _is_number_pairs(obj) -> bool:
    return all(isinstance(v, (list, tuple)) and len(v) == 2 and not any(isinstance(c, (list, dict)) for c in v) for v in obj)


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        out = []
        for col in columns:
            v = row[col]
            if isinstance(v, (bool, np.bool_)):
                out.append("true" if v else "false")
            elif isinstance(v, (float, np.floating)):
                out.append(format_float(float(v)).strip('"'))
            elif isinstance(v, complex):
                out.append(f"{v.real:.17g}{v.imag:+.17g}j")
            elif v is None:
                out.append("")
            else:
                out.append(str(v))
        writer.writerow(out)
    return buf.getvalue()
