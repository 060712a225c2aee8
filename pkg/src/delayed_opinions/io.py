"""File interchange: matrix JSON and fixed-precision CSV."""

import json
import math

import numpy as np

from .errors import InvalidMatrix
from .graph import as_weight_matrix


def matrix_to_dict(w, meta=None):
    w = as_weight_matrix(w)
    d = {"n": int(w.shape[0]), "w": [[float(v) for v in row] for row in w]}
    if meta:
        d["meta"] = meta
    return d


def matrix_from_dict(d):
    """Validate a parsed matrix document ``{"n": n, "w": [[...], ...]}``."""
    if not isinstance(d, dict) or "w" not in d:
        raise InvalidMatrix('matrix document needs a "w" field')
    rows = d["w"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InvalidMatrix('"w" must be a list of rows')
    for row in rows:
        for v in row:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InvalidMatrix(f"non-numeric matrix entry {v!r}")
    try:
        w = np.array(rows, dtype=float)
    except ValueError as exc:
        raise InvalidMatrix(f"ragged matrix rows: {exc}") from exc
    w = as_weight_matrix(w)
    if "n" in d and d["n"] != w.shape[0]:
        raise InvalidMatrix(f'"n" = {d["n"]} but the matrix has {w.shape[0]} rows')
    return w


def dumps(obj):
    """Deterministic JSON text (sorted keys, shortest round-trip floats)."""
    return json.dumps(_plain(obj), sort_keys=True, indent=1) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (frozenset, set)):
        return sorted(obj)
    return obj


def read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidMatrix(f"{path}: not valid JSON ({exc})") from exc
    return matrix_from_dict(doc)


def write_matrix(path, w, meta=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(matrix_to_dict(w, meta)))


def csv_text(header, rows):
    """Header line plus rows formatted with 17 significant digits."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    lines = [",".join(header)]
    lines.extend(",".join("%.17g" % v for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(header, rows))


def read_csv(path):
    """Inverse of :func:`write_csv`: (header, float array)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, data
