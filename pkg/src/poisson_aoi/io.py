"""CSV/JSON emission with a parameter-echo comment line.

Every CSV starts with ``# params: <json>`` followed by a header row. Floats
are written with ``repr`` so reading a file back and re-emitting it gives the
same bytes.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

PARAM_PREFIX = "# params: "


def _plain(v):
    """Convert numpy scalars/arrays and enums to JSON-friendly Python values."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if hasattr(v, "value") and not isinstance(v, (int, float, str)):
        return v.value
    return v


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if hasattr(v, "value"):
        return str(v.value)
    return str(v)


def parse(s: str):
    if s == "":
        return None
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def write_csv(path, rows, columns, params: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(PARAM_PREFIX + json.dumps(_plain(params), sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(r.get(c)) for c in columns])
    return path


def read_csv(path) -> tuple[dict, list[str], list[dict]]:
    with open(path, newline="", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.startswith(PARAM_PREFIX):
            raise ValueError(f"{path}: missing parameter comment line")
        params = json.loads(first[len(PARAM_PREFIX):])
        reader = csv.reader(fh)
        columns = next(reader)
        rows = [dict(zip(columns, (parse(x) for x in rec))) for rec in reader]
    return params, columns, rows


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_plain(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
