"""
Canonical serialization of command results.

JSON is written with sorted keys and every ExtReal passed through
format_ext, so identical runs give byte-identical output.
"""
import io
import csv
import json
from fractions import Fraction
from typing import Iterable, List, Sequence

import numpy as np

from core.extreal import format_ext

UNDEFINED = ""


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, float, Fraction)):
        return format_ext(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(payload) -> str:
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def csv_cell(value) -> str:
    if value is None:
        return UNDEFINED
    value = to_jsonable(value)
    return str(value)


def dump_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([csv_cell(value) for value in row])
    return buffer.getvalue()


def comment_block(label: str, payload) -> str:
    """A JSON document appended to CSV output as '#'-prefixed lines."""
    lines: List[str] = dump_json({label: payload}).rstrip("\n").split("\n")
    return "".join(f"# {line}\n" for line in lines)
