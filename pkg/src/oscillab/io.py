"""Deterministic CSV and JSON writers.

Numbers are written with 17 significant digits (CSV) or the shortest
round-trip representation (JSON), with LF line endings, so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .ode import Trajectory

__all__ = ["format_number", "write_csv", "write_json", "emit_trajectory", "jsonable"]


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "%.17g" % x
    return str(x)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    lines.extend(",".join(format_number(v) for v in row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def jsonable(obj):
    """Plain JSON types; non-finite floats become ``null``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, complex):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def write_json(path, obj) -> Path:
    path = Path(path)
    text = json.dumps(jsonable(obj), indent=2, sort_keys=True, allow_nan=False)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")
    return path


def emit_trajectory(traj: Trajectory, path, labels: Sequence[str] = ("q", "v"),
                    times=None) -> Path:
    """CSV with columns ``t`` and ``labels``; rows at the step nodes or at ``times``."""
    if len(labels) != traj.dim:
        raise ValueError(f"{len(labels)} labels for a {traj.dim}-dimensional trajectory")
    if times is None:
        ts, ys = traj.t, traj.y
    else:
        ts = np.asarray(times, dtype=float)
        ys = traj(ts)
    rows = (np.concatenate([[t], y]) for t, y in zip(ts, ys))
    return write_csv(path, ("t",) + tuple(labels), rows)
