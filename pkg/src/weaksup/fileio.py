"""Small file-output helpers.

Writes are atomic: content goes to a temporary file in the target
directory which is then renamed over the destination, so readers never
see partial output. Floats are serialized with ``repr``, the shortest
form that round-trips, which makes outputs byte-stable across runs.
"""

from __future__ import annotations

import json
import os
from pathlib import Path


def format_value(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.parent / f".{path.name}.tmp"
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
    return path


def write_csv(path, header, rows) -> Path:
    lines = [",".join(header)]
    width = len(tuple(header))
    for row in rows:
        row = tuple(row)
        if len(row) != width:
            raise ValueError(f"row {row!r} has {len(row)} fields, expected {width}")
        lines.append(",".join(format_value(v) for v in row))
    return atomic_write_text(path, "\n".join(lines) + "\n")


def write_json(path, payload) -> Path:
    return atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=False) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
