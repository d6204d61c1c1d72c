"""File formats.

Family and trace files share one layout::

    # xstar: v1,v2,...,vd
    x1,...,xd,g1,...,gd[,f]

All floats are written with 17 significant digits so doubles round-trip
exactly.  Writes go to a temporary file that is renamed into place.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

XSTAR_PREFIX = "# xstar:"


class FormatError(ValueError):
    pass


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def atomic_write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header is not None:
        w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows):
    atomic_write_text(path, csv_text(header, rows))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        # JSON has no inf/nan; keep the CSV spelling
        return v if math.isfinite(v) else fmt(v)
    return obj


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj):
    atomic_write_text(path, json_text(obj))


def family_text(X, G, xstar, F=None) -> str:
    X = np.atleast_2d(X)
    G = np.atleast_2d(G)
    lines = [XSTAR_PREFIX + " " + ",".join(fmt(v) for v in xstar)]
    for i in range(X.shape[0]):
        row = [*X[i], *G[i]]
        if F is not None:
            row.append(F[i])
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_family(path, X, G, xstar, F=None):
    atomic_write_text(path, family_text(X, G, xstar, F))


def read_family(path):
    """Parse a family/trace file into ``(X, G, F_or_None, xstar)``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith(XSTAR_PREFIX):
        raise FormatError(f"first line must start with '{XSTAR_PREFIX}'")
    try:
        xstar = np.array([float(v) for v in lines[0][len(XSTAR_PREFIX):].split(",")])
    except ValueError as exc:
        raise FormatError(f"bad xstar row: {exc}") from exc
    d = xstar.size
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        if ln.startswith("#"):
            continue
        try:
            vals = [float(v) for v in ln.split(",")]
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        rows.append(vals)
    if not rows:
        raise FormatError("no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1 or widths.pop() not in (2 * d, 2 * d + 1):
        raise FormatError(f"rows must have {2 * d} or {2 * d + 1} columns for d={d}")
    A = np.array(rows)
    F = A[:, 2 * d] if A.shape[1] == 2 * d + 1 else None
    return A[:, :d], A[:, d:2 * d], F, xstar
