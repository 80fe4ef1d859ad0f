"""JSON file formats.

Complex numbers are two-element arrays ``[re, im]`` and matrices are
row-major nested lists, so every float survives a write/read cycle
bit for bit (``json`` writes the shortest round-tripping repr).

POVM file::

    {"n": int, "d": int,
     "atoms": [{"point": [[re, im], ...], "weight": [[[re, im], ...], ...]}]}

Matrix tuple file::

    {"n": int, "d": int, "matrices": [matrix, ...]}

(a file holding a single ``"matrix"`` is read as a tuple with ``n = 1``).
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DilationError
from .naimark import NaimarkDilation
from .povm import DiscretePOVM
from .spectrum import MatrixTuple


class InputFormatError(DilationError):
    """A file could not be read or does not follow the expected schema."""


def complex_to_json(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def array_to_json(a):
    """Nested lists of ``[re, im]`` pairs for an array of any rank."""
    a = np.asarray(a, dtype=np.complex128)
    pairs = np.stack([a.real, a.imag], axis=-1)
    return pairs.tolist()


def array_from_json(obj) -> np.ndarray:
    pairs = np.asarray(obj, dtype=np.float64)
    if pairs.ndim == 0 or pairs.shape[-1] != 2:
        raise InputFormatError(f"expected [re, im] pairs, got array of shape {pairs.shape}")
    out = np.empty(pairs.shape[:-1], dtype=np.complex128)
    # assign parts separately so signed zeros survive
    out.real = pairs[..., 0]
    out.imag = pairs[..., 1]
    return out


def povm_to_json(povm: DiscretePOVM) -> dict:
    return {
        "n": povm.n,
        "d": povm.d,
        "atoms": [
            {"point": array_to_json(p), "weight": array_to_json(W)}
            for p, W in zip(povm.points, povm.weights)
        ],
    }


def povm_from_json(obj) -> DiscretePOVM:
    try:
        n, d = int(obj["n"]), int(obj["d"])
        atoms = obj["atoms"]
        points = np.stack([array_from_json(a["point"]).reshape(n) for a in atoms])
        weights = np.stack([array_from_json(a["weight"]).reshape(d, d) for a in atoms])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"malformed POVM file: {exc}") from exc
    return DiscretePOVM(points, weights)


def tuple_to_json(T) -> dict:
    mats = T.matrices if isinstance(T, MatrixTuple) else np.asarray(T)
    return {"n": int(mats.shape[0]), "d": int(mats.shape[1]), "matrices": array_to_json(mats)}


def tuple_from_json(obj, tol=None, check=True) -> MatrixTuple:
    try:
        if "matrix" in obj:
            mats = array_from_json(obj["matrix"])[None]
        else:
            mats = array_from_json(obj["matrices"])
            if "n" in obj and mats.shape[0] != int(obj["n"]):
                raise ValueError(f"declared n={obj['n']} but found {mats.shape[0]} matrices")
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"malformed matrix tuple file: {exc}") from exc
    kwargs = {} if tol is None else {"tol": tol}
    return MatrixTuple(list(mats), check=check, **kwargs)


def naimark_to_json(nd: NaimarkDilation) -> dict:
    return {
        "kind": "naimark",
        "M": nd.M,
        "d": nd.d,
        "D": nd.D,
        "V": array_to_json(nd.V),
        "projections": [nd.projection_indices(j) for j in range(nd.M)],
    }


def naimark_from_json(obj) -> NaimarkDilation:
    try:
        return NaimarkDilation(V=array_from_json(obj["V"]), M=int(obj["M"]), d=int(obj["d"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"malformed Naimark file: {exc}") from exc


def mdilation_to_json(dil) -> dict:
    out = {
        "kind": "m_dilation",
        "n": dil.tuple_N.n,
        "d": int(dil.V.shape[1]),
        "D": dil.dimension,
        "m": dil.m,
        "source_povm_id": dil.source_povm_id,
        "V": array_to_json(dil.V),
        "support": array_to_json(dil.support),
    }
    if dil.projection_indices is not None:
        out["projections"] = dil.projection_indices
    else:
        out["N"] = array_to_json(dil.tuple_N.matrices)
    return out


def mdilation_from_json(obj):
    from .dilation import MDilation

    try:
        V = array_from_json(obj["V"])
        support = array_from_json(obj["support"]).reshape(-1, int(obj["n"]))
        m = int(obj["m"])
        source = obj.get("source_povm_id", "")
        if "projections" in obj:
            return MDilation.from_spectral(support, obj["projections"], V, m, source)
        N = MatrixTuple(list(array_from_json(obj["N"])), check=False)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"malformed dilation file: {exc}") from exc
    return MDilation(N, V, m, support, source, None)


def points_from_json(obj) -> np.ndarray:
    try:
        pts = array_from_json(obj["points"])
    except (KeyError, TypeError) as exc:
        raise InputFormatError(f"malformed point set file: {exc}") from exc
    return pts[:, None] if pts.ndim == 1 else pts


def dumps(obj, compact: bool = False) -> str:
    if compact:
        return json.dumps(obj, separators=(",", ":"), allow_nan=False)
    return json.dumps(obj, indent=2, allow_nan=False)


def write_json(obj, path, compact: bool = False) -> None:
    Path(path).write_text(dumps(obj, compact) + "\n", encoding="utf-8")


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc


def read_povm(path) -> DiscretePOVM:
    return povm_from_json(read_json(path))


def write_povm(povm: DiscretePOVM, path) -> None:
    write_json(povm_to_json(povm), path, compact=True)
