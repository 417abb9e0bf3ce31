"""Deterministic artifact writers.

Tables go to CSV with '#'-prefixed header comments carrying the column names
and the fully resolved run configuration; matrices go to JSON with row-major
[re, im] entry pairs.  All floats are printed with 17 significant digits so
a parse/format round trip is lossless and repeated runs are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def matrix_payload(M: np.ndarray) -> dict:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in M.reshape(-1)],
    }


def vector_payload(v: np.ndarray) -> list:
    return [float(x) for x in np.asarray(v, dtype=float)]


def write_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path


def write_csv(
    path: str | Path,
    columns: list[str],
    rows: list[list[float]],
    config: dict | None = None,
    footer: list[str] | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    if config is not None:
        lines.append("# config: " + json.dumps(config, sort_keys=True))
    lines.append("# columns: " + ",".join(columns))
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    for extra in footer or []:
        lines.append("# " + extra)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Parse a CSV written by :func:`write_csv` (used by tests and plots)."""
    lines = Path(path).read_text().splitlines()
    data = [ln for ln in lines if ln and not ln.startswith("#")]
    columns = data[0].split(",")
    rows = np.array([[float(x) for x in ln.split(",")] for ln in data[1:]])
    return columns, rows
