"""Output emitters for the command line: json, csv and aligned text."""
import csv
import io
import json
import sys
from enum import Enum
from fractions import Fraction
from typing import Any, Sequence, TextIO, Union

import mpmath

from utils.numerics import DOUBLE, Numerics

FORMATS = ("json", "csv", "text")

Record = dict[str, Any]


def format_value(value: Any, numerics: Numerics = DOUBLE) -> Any:
    """
    Convert a value to its printable form.

    Doubles keep 15 significant digits and stay JSON numbers; extended
    values become strings with 30 digits; fractions print as "a/b".
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return value
    if isinstance(value, mpmath.mpf):
        return numerics.format(value)
    if isinstance(value, float):
        if numerics.name == "double":
            return float(numerics.format(value))
        return numerics.format(value)
    if isinstance(value, dict):
        return {k: format_value(v, numerics) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [format_value(v, numerics) for v in value]
    return str(value)


def to_json(data: Union[Record, Sequence[Record]], numerics: Numerics = DOUBLE) -> str:
    return json.dumps(format_value(data, numerics), indent=2, ensure_ascii=False)


def to_csv(rows: Sequence[Record], numerics: Numerics = DOUBLE) -> str:
    if not rows:
        return ""
    buffer = io.StringIO()
    fieldnames = list(rows[0].keys())
    for row in rows[1:]:
        fieldnames.extend(k for k in row if k not in fieldnames)
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in format_value(row, numerics).items()})
    return buffer.getvalue()


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, list):
        return " ".join(str(v) for v in value)
    return str(value)


def to_text(data: Union[Record, Sequence[Record]], numerics: Numerics = DOUBLE) -> str:
    if isinstance(data, dict):
        formatted = format_value(data, numerics)
        width = max((len(k) for k in formatted), default=0)
        return "\n".join(f"{k.ljust(width)}  {_cell(v)}" for k, v in formatted.items())

    rows = [{k: _cell(v) for k, v in format_value(row, numerics).items()} for row in data]
    if not rows:
        return ""
    headers = list(rows[0].keys())
    widths = {h: max(len(h), *(len(row.get(h, "")) for row in rows)) for h in headers}
    lines = ["  ".join(h.ljust(widths[h]) for h in headers)]
    lines.extend("  ".join(row.get(h, "").ljust(widths[h]) for h in headers) for row in rows)
    return "\n".join(line.rstrip() for line in lines)


def render(data: Union[Record, Sequence[Record]], fmt: str, numerics: Numerics = DOUBLE) -> str:
    """Render a record or a list of records in one of FORMATS."""
    if fmt == "json":
        return to_json(data, numerics)
    if fmt == "csv":
        return to_csv([data] if isinstance(data, dict) else data, numerics)
    if fmt == "text":
        return to_text(data, numerics)
    raise ValueError(f"Unknown output format: {fmt}")


def emit(data: Union[Record, Sequence[Record]], fmt: str, numerics: Numerics = DOUBLE,
         stream: TextIO = None) -> None:
    stream = stream or sys.stdout
    text = render(data, fmt, numerics)
    stream.write(text if text.endswith("\n") else text + "\n")
