"""JSON documents for states, channels and dilations.

Floats are written with Python's shortest round-trip repr, so a write
followed by a read reproduces every double exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channel import GaussianChannel
from .errors import InvalidInputError
from .models import Dilation, dilation_channel
from .state import CovarianceMatrix, validate_covariance


def _matrix(doc, key, shape=None) -> np.ndarray:
    if key not in doc:
        raise InvalidInputError(f"missing field {key!r}")
    rows = doc[key]
    try:
        a = np.zeros((0, 0)) if rows == [] else np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"field {key!r} is not a numeric matrix") from exc
    if a.ndim != 2:
        raise InvalidInputError(f"field {key!r} must be a list of rows")
    if shape is not None and a.shape != shape:
        raise InvalidInputError(f"field {key!r} has shape {a.shape}, expected {shape}")
    return a


def _int(doc, key) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise InvalidInputError(f"field {key!r} must be a nonnegative integer")
    return v


def state_to_doc(G) -> dict:
    G = G.G if isinstance(G, CovarianceMatrix) else np.asarray(G, dtype=float)
    return {"n": G.shape[0] // 2, "G": G.tolist()}


def state_from_doc(doc: dict, tol: float | None = None) -> CovarianceMatrix:
    n = _int(doc, "n")
    G = _matrix(doc, "G", (2 * n, 2 * n))
    return validate_covariance(G) if tol is None else validate_covariance(G, tol)


def channel_to_doc(ch: GaussianChannel) -> dict:
    return {
        "n_in": ch.n_in,
        "n_out": ch.n_out,
        "A": ch.A.tolist(),
        "B": ch.B.tolist(),
        "C": [ch.C.real, ch.C.imag],
        "D": ch.D.tolist(),
    }


def channel_from_doc(doc: dict) -> GaussianChannel:
    n_in, n_out = _int(doc, "n_in"), _int(doc, "n_out")
    A = _matrix(doc, "A", (2 * n_out, 2 * n_out))
    B = _matrix(doc, "B", (2 * n_out, 2 * n_in))
    C = doc.get("C", [1.0, 0.0])
    if isinstance(C, (int, float)):
        C = [C, 0.0]
    if not (isinstance(C, list) and len(C) == 2):
        raise InvalidInputError("field 'C' must be [re, im]")
    D = _matrix(doc, "D", (2 * n_in, 2 * n_in)) if "D" in doc else None
    return GaussianChannel(A, B, complex(C[0], C[1]), D)


def dilation_to_doc(d: Dilation) -> dict:
    return {"R": d.R.tolist(), "G_E": d.G_E.G.tolist(), "n": d.n, "m": d.m}


def dilation_from_doc(doc: dict) -> Dilation:
    n, m = _int(doc, "n"), _int(doc, "m")
    R = _matrix(doc, "R", (2 * (n + m), 2 * (n + m)))
    G_E = _matrix(doc, "G_E", (2 * m, 2 * m))
    return Dilation(R, validate_covariance(G_E), n, m)


def document_kind(doc) -> str:
    """``'state'``, ``'channel'`` or ``'dilation'`` by the fields present."""
    if not isinstance(doc, dict):
        raise InvalidInputError("top-level JSON value must be an object")
    if "R" in doc:
        return "dilation"
    if "B" in doc:
        return "channel"
    if "G" in doc:
        return "state"
    raise InvalidInputError("cannot tell document kind: expected field 'G', 'B' or 'R'")


def read_json(path) -> dict:
    """Parse a UTF-8 JSON file; :class:`json.JSONDecodeError` carries line and column."""
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc) + "\n", encoding="utf-8")


def load_state(path) -> CovarianceMatrix:
    return state_from_doc(read_json(path))


def load_channel(path) -> GaussianChannel:
    doc = read_json(path)
    if document_kind(doc) == "dilation":
        return dilation_channel(dilation_from_doc(doc))
    return channel_from_doc(doc)
