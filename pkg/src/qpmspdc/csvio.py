"""Plain-text CSV output with provenance headers."""

from __future__ import annotations

import hashlib
import json
import math


def fmt(x) -> str:
    """9 significant digits; NA for missing values."""
    if x is None:
        return "NA"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "NA"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.9g}"


def fingerprint(description: dict) -> str:
    blob = json.dumps(description, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def header_lines(meta: dict) -> list[str]:
    return [f"# {key} = {fmt(value) if isinstance(value, (int, float)) else value}" for key, value in meta.items()]


def write_table(fh, meta: dict, columns: list[str], rows) -> None:
    for line in header_lines(meta):
        fh.write(line + "\n")
    fh.write(",".join(columns) + "\n")
    for row in rows:
        fh.write(",".join(cell if isinstance(cell, str) else fmt(cell) for cell in row) + "\n")
