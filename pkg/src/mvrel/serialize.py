"""JSON formats for subspaces, relations, matrices and W-LSS problems.

Complex entries are written as ``[re, im]`` pairs.  Floats go through
``repr`` (via :mod:`json`), which is the shortest string that round-trips
exactly.
"""

import json

import numpy as np

from . import relation as rl
from . import subspace as sp
from ._linalg import RANK_TOL

__all__ = [
    "SerializationError",
    "encode_array",
    "decode_array",
    "matrix_to_json",
    "matrix_from_json",
    "vector_from_json",
    "subspace_to_json",
    "subspace_from_json",
    "relation_to_json",
    "relation_from_json",
    "affine_to_json",
    "load_json",
    "dumps",
]


class SerializationError(ValueError):
    """Malformed input; the message names the offending field."""


def _num(z):
    if isinstance(z, complex) or np.iscomplexobj(z):
        return [float(np.real(z)), float(np.imag(z))]
    return float(z)


def _nested(a):
    if a.ndim == 0:
        return _num(a[()])
    return [_nested(x) for x in a]


def encode_array(a):
    """Shape-exact encoding used in failure dumps."""
    a = np.asarray(a)
    cplx = np.iscomplexobj(a)
    flat = a.ravel()
    data = [[float(z.real), float(z.imag)] for z in flat] if cplx else [float(z) for z in flat]
    return {"shape": list(a.shape), "scalar": "complex" if cplx else "real", "data": data}


def decode_array(obj, field="array"):
    try:
        shape = tuple(int(s) for s in obj["shape"])
        data = np.asarray(obj["data"], dtype=float)
        if obj.get("scalar", "real") == "complex":
            data = data.reshape(-1, 2) if data.size else data.reshape(0, 2)
            data = data[:, 0] + 1j * data[:, 1]
        return data.reshape(shape)
    except (KeyError, TypeError, ValueError) as exc:
        raise SerializationError(f"{field}: {exc}") from None


def matrix_to_json(a):
    return _nested(np.asarray(a))


def _from_nested(obj, ndim, field):
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise SerializationError(f"{field}: expected a numeric array") from None
    if arr.ndim == ndim + 1 and arr.shape[-1] == 2:
        arr = arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim != ndim:
        raise SerializationError(f"{field}: expected {ndim} dimension(s), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise SerializationError(f"{field}: non-finite entries")
    return arr


def matrix_from_json(obj, field="matrix"):
    return _from_nested(obj, 2, field)


def vector_from_json(obj, field="vector"):
    return _from_nested(obj, 1, field)


def _rows(obj, width, field):
    if obj == [] or obj is None:
        return np.zeros((0, width))
    rows = matrix_from_json(obj, field)
    if rows.shape[1] != width:
        raise SerializationError(f"{field}: rows must have length {width}, got {rows.shape[1]}")
    return rows


def _field(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise SerializationError(f"{where}: missing field '{key}'")
    return obj[key]


def _scalar(obj, where):
    s = obj.get("scalar", "real") if isinstance(obj, dict) else "real"
    if s not in ("real", "complex"):
        raise SerializationError(f"{where}.scalar: must be 'real' or 'complex', got {s!r}")
    return s


def subspace_to_json(M):
    return {"ambient": M.ambient_dim, "scalar": M.scalar, "generators": matrix_to_json(M.basis.T)}


def subspace_from_json(obj, field="subspace", tol=RANK_TOL):
    n = int(_field(obj, "ambient", field))
    scalar = _scalar(obj, field)
    rows = _rows(_field(obj, "generators", field), n, f"{field}.generators")
    if scalar == "complex":
        rows = rows.astype(complex)
    return sp.span(list(rows), n, tol)


def relation_to_json(T):
    return {
        "dim_in": T.dim_in,
        "dim_out": T.dim_out,
        "scalar": T.scalar,
        "generators": matrix_to_json(T.graph.basis.T),
    }


def relation_from_json(obj, field="relation", tol=RANK_TOL):
    n = int(_field(obj, "dim_in", field))
    m = int(_field(obj, "dim_out", field))
    scalar = _scalar(obj, field)
    rows = _rows(_field(obj, "generators", field), n + m, f"{field}.generators")
    if scalar == "complex":
        rows = rows.astype(complex)
    return rl.from_generator_rows(rows, n, m, tol)


def affine_to_json(X):
    return {
        "nonempty": bool(X.nonempty),
        "point": matrix_to_json(X.point) if X.nonempty else None,
        "directions": matrix_to_json(X.directions.basis.T),
    }


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SerializationError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SerializationError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)
