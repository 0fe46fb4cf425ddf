"""Serialization of channels, correlation matrices, and decompositions.

All files are UTF-8 JSON carrying ``"format": "muchan/1"``.  Matrices are
nested arrays, row-major, each entry a two-element array [re, im]; floats
round-trip exactly (shortest repr).
"""
from __future__ import annotations

import json
from typing import Optional

import numpy as np

from .analysis import MixedUnitaryDecomposition
from .channels import KrausChannel
from .constructive import ToroidalDecomposition
from .exceptions import FileFormatError
from .tolerances import DEFAULT_TOL, Tolerance

__all__ = [
    "FORMAT", "matrix_to_literal", "matrix_from_literal",
    "channel_to_obj", "channel_from_obj", "correlation_to_obj",
    "decomposition_to_obj", "decomposition_from_obj",
    "toroidal_to_obj", "toroidal_from_obj", "matrix_obj",
    "save", "load", "dumps",
]

FORMAT = "muchan/1"


def matrix_to_literal(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def _bad(msg: str, path: Optional[str] = None) -> FileFormatError:
    return FileFormatError(msg, path)


def matrix_from_literal(lit, path: Optional[str] = None) -> np.ndarray:
    if not isinstance(lit, list) or not lit:
        raise _bad("matrix literal must be a nonempty list of rows", path)
    try:
        rows = []
        for row in lit:
            rows.append([complex(float(e[0]), float(e[1])) for e in row])
        m = np.array(rows, dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise _bad(f"malformed matrix literal: {exc}", path) from exc
    if m.ndim != 2:
        raise _bad("matrix literal rows have inconsistent lengths", path)
    return m


def vector_to_literal(v) -> list:
    v = np.asarray(v, dtype=complex)
    return [[float(x.real), float(x.imag)] for x in v]


def vector_from_literal(lit, path: Optional[str] = None) -> np.ndarray:
    try:
        return np.array([complex(float(e[0]), float(e[1])) for e in lit], dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise _bad(f"malformed vector literal: {exc}", path) from exc


def channel_to_obj(phi: KrausChannel) -> dict:
    return {
        "format": FORMAT,
        "kind": "kraus",
        "dim_in": phi.dim_in,
        "dim_out": phi.dim_out,
        "operators": [matrix_to_literal(a) for a in phi.kraus],
    }


def channel_from_obj(obj: dict, tol: Tolerance = DEFAULT_TOL,
                     path: Optional[str] = None) -> KrausChannel:
    ops = [matrix_from_literal(o, path) for o in obj.get("operators", [])]
    if not ops:
        raise _bad("channel file has no operators", path)
    phi = KrausChannel(ops, tol)
    if phi.dim_in != obj.get("dim_in") or phi.dim_out != obj.get("dim_out"):
        raise _bad("declared dimensions disagree with the operators", path)
    return phi


def correlation_to_obj(c) -> dict:
    c = np.asarray(c, dtype=complex)
    return {"format": FORMAT, "kind": "correlation", "dim": c.shape[0],
            "matrix": matrix_to_literal(c)}


def matrix_obj(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"format": FORMAT, "kind": "matrix", "dim": m.shape[0],
            "matrix": matrix_to_literal(m)}


def decomposition_to_obj(d: MixedUnitaryDecomposition) -> dict:
    return {
        "format": FORMAT,
        "kind": "mixed-unitary",
        "dim": d.dim,
        "probs": [float(p) for p in d.probs],
        "unitaries": [matrix_to_literal(u) for u in d.unitaries],
    }


def decomposition_from_obj(obj: dict, tol: Tolerance = DEFAULT_TOL,
                           path: Optional[str] = None) -> MixedUnitaryDecomposition:
    try:
        probs = [float(p) for p in obj["probs"]]
        us = [matrix_from_literal(u, path) for u in obj["unitaries"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise _bad(f"malformed decomposition: {exc}", path) from exc
    return MixedUnitaryDecomposition(probs, us, tol)


def toroidal_to_obj(t: ToroidalDecomposition) -> dict:
    return {
        "format": FORMAT,
        "kind": "toroidal",
        "dim": t.dim,
        "probs": [float(p) for p in t.probs],
        "vectors": [vector_to_literal(v) for v in t.vectors],
    }


def toroidal_from_obj(obj: dict, tol: Tolerance = DEFAULT_TOL,
                      path: Optional[str] = None) -> ToroidalDecomposition:
    try:
        probs = [float(p) for p in obj["probs"]]
        vs = [vector_from_literal(v, path) for v in obj["vectors"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise _bad(f"malformed toroidal decomposition: {exc}", path) from exc
    return ToroidalDecomposition(probs, vs, tol)


def to_obj(thing) -> dict:
    if isinstance(thing, KrausChannel):
        return channel_to_obj(thing)
    if isinstance(thing, MixedUnitaryDecomposition):
        return decomposition_to_obj(thing)
    if isinstance(thing, ToroidalDecomposition):
        return toroidal_to_obj(thing)
    if isinstance(thing, np.ndarray):
        return correlation_to_obj(thing)
    raise TypeError(f"cannot serialize {type(thing).__name__}")


def dumps(thing) -> str:
    return json.dumps(to_obj(thing), sort_keys=True)


def save(thing, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_obj(thing), fh, sort_keys=True)
        fh.write("\n")


def load(path: str, tol: Tolerance = DEFAULT_TOL):
    """Load any muchan/1 object; returns (kind, object)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise _bad(f"cannot read file: {exc}", path) from exc
    except json.JSONDecodeError as exc:
        raise _bad(f"not valid JSON: {exc}", path) from exc
    if not isinstance(obj, dict) or obj.get("format") != FORMAT:
        raise _bad(f"missing or unsupported format version "
                   f"(expected {FORMAT!r})", path)
    kind = obj.get("kind")
    if kind == "kraus":
        return kind, channel_from_obj(obj, tol, path)
    if kind == "mixed-unitary":
        return kind, decomposition_from_obj(obj, tol, path)
    if kind == "toroidal":
        return kind, toroidal_from_obj(obj, tol, path)
    if kind in ("correlation", "matrix"):
        return kind, matrix_from_literal(obj.get("matrix"), path)
    raise _bad(f"unknown kind {kind!r}", path)


def load_channel(path: str, tol: Tolerance = DEFAULT_TOL) -> KrausChannel:
    kind, obj = load(path, tol)
    if kind != "kraus":
        raise _bad(f"expected a channel file, found kind {kind!r}", path)
    return obj


def load_decomposition(path: str, tol: Tolerance = DEFAULT_TOL) -> MixedUnitaryDecomposition:
    kind, obj = load(path, tol)
    if kind != "mixed-unitary":
        raise _bad(f"expected a decomposition file, found kind {kind!r}", path)
    return obj


def load_matrix(path: str, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    kind, obj = load(path, tol)
    if kind not in ("correlation", "matrix"):
        raise _bad(f"expected a matrix file, found kind {kind!r}", path)
    return obj
