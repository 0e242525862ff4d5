"""JSON / CSV output with 17 significant digits for every float."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .states import DensityMatrix


def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def fmt(x) -> str:
    """Scalar as CSV/JSON text; ``None`` becomes the empty string."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return _float(float(x))
    return str(x)


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON; floats carry 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def density_to_dict(rho: DensityMatrix) -> dict:
    """``{"dims": [d1, d2], "entries": [[[re, im], ...], ...]}`` in row-major order."""
    m = rho.matrix
    return {
        "dims": list(rho.dims),
        "entries": [[[float(x.real), float(x.imag)] for x in row] for row in m],
    }


def density_from_dict(d: dict) -> DensityMatrix:
    m = np.array([[complex(re, im) for re, im in row] for row in d["entries"]])
    return DensityMatrix(m, tuple(d["dims"]))


def density_to_json(rho: DensityMatrix) -> str:
    return dumps(density_to_dict(rho))


def density_from_json(text: str) -> DensityMatrix:
    return density_from_dict(json.loads(text))


def density_to_csv(rho: DensityMatrix) -> str:
    """One row per entry: ``row,col,re,im`` with dims in a leading comment."""
    buf = io.StringIO()
    d1, d2 = rho.dims
    buf.write(f"# dims={d1},{d2}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "re", "im"])
    for i, row in enumerate(rho.matrix):
        for j, x in enumerate(row):
            w.writerow([i, j, _float(float(x.real)), _float(float(x.imag))])
    return buf.getvalue()


def density_from_csv(text: str) -> DensityMatrix:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# dims="):
        raise ValueError("missing '# dims=d1,d2' header")
    d1, d2 = (int(x) for x in lines[0][len("# dims="):].split(","))
    m = np.zeros((d1 * d2, d1 * d2), dtype=complex)
    for rec in csv.DictReader(lines[1:]):
        m[int(rec["row"]), int(rec["col"])] = complex(float(rec["re"]), float(rec["im"]))
    return DensityMatrix(m, (d1, d2))
