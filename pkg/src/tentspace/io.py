"""TSF1 serialization for sampled functions and half-space fields.

Binary layout: magic ``TSF1``, little-endian u32 fields (n, N, K, d) with
K = 0 marking a plain sampled function, little-endian f64 fields
(L, t_min, t_max, q), then the complex samples as little-endian f64
(re, im) pairs in row-major order, spatial index outermost, then the scale
index, vector components innermost.  The sup-norm exponent is stored as
IEEE +inf in the file and mapped back to the tagged encoding on read.

A JSON text form with the same fields serves small fixtures.
"""

from __future__ import annotations

import json
import math
import struct

import numpy as np

from .field import HalfSpaceField, SampledFunction, ScaleGrid, SpatialGrid
from .space import ell

__all__ = ["write_tsf1", "read_tsf1", "to_json_obj", "from_json_obj",
           "write_json", "read_json"]

_MAGIC = b"TSF1"


def _header(obj) -> tuple:
    if isinstance(obj, HalfSpaceField):
        return (obj.grid, obj.scales, obj.space)
    if isinstance(obj, SampledFunction):
        return (obj.grid, None, obj.space)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _file_values(obj) -> np.ndarray:
    """Samples with the spatial axes outermost, scale axis next."""
    if isinstance(obj, HalfSpaceField):
        return np.moveaxis(obj.values, 0, obj.grid.n)
    return obj.values


def write_tsf1(obj, path) -> None:
    grid, scales, space = _header(obj)
    K = scales.K if scales is not None else 0
    t_min = scales.t_min if scales is not None else 0.0
    t_max = scales.t_max if scales is not None else 0.0
    q = math.inf if space.q is None else space.q
    vals = np.ascontiguousarray(_file_values(obj), dtype=np.complex128)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<4I", grid.n, grid.N, K, space.dim))
        fh.write(struct.pack("<4d", grid.L, t_min, t_max, q))
        flat = vals.reshape(-1)
        pairs = np.empty(2 * flat.size, dtype="<f8")
        pairs[0::2] = flat.real
        pairs[1::2] = flat.imag
        fh.write(pairs.tobytes())


def read_tsf1(path):
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a TSF1 file")
        n, N, K, d = struct.unpack("<4I", fh.read(16))
        L, t_min, t_max, q = struct.unpack("<4d", fh.read(32))
        grid = SpatialGrid(n, N, L)
        count = grid.size * max(K, 1) * d
        pairs = np.frombuffer(fh.read(16 * count), dtype="<f8")
        if pairs.size != 2 * count:
            raise ValueError(f"{path}: truncated sample block")
    vals = pairs[0::2] + 1j * pairs[1::2]
    space = ell(None if math.isinf(q) else q, d)
    if K == 0:
        return SampledFunction(grid, space, vals.reshape(grid.shape + (d,)))
    scales = ScaleGrid(t_min, t_max, K)
    arr = vals.reshape(grid.shape + (K, d))
    return HalfSpaceField(grid, scales, space, np.moveaxis(arr, grid.n, 0))


def to_json_obj(obj) -> dict:
    grid, scales, space = _header(obj)
    vals = _file_values(obj).reshape(-1)
    return {
        "format": "TSF1-json",
        "n": grid.n,
        "N": grid.N,
        "K": scales.K if scales is not None else 0,
        "d": space.dim,
        "L": grid.L,
        "t_min": scales.t_min if scales is not None else 0.0,
        "t_max": scales.t_max if scales is not None else 0.0,
        "q": "inf" if space.q is None else space.q,
        "values": [x for z in vals for x in (z.real, z.imag)],
    }


def from_json_obj(d: dict):
    if d.get("format") != "TSF1-json":
        raise ValueError("not a TSF1-json object")
    grid = SpatialGrid(d["n"], d["N"], d["L"])
    space = ell(None if d["q"] == "inf" else d["q"], d["d"])
    raw = np.asarray(d["values"], dtype=float)
    vals = raw[0::2] + 1j * raw[1::2]
    if d["K"] == 0:
        return SampledFunction(grid, space, vals.reshape(grid.shape + (space.dim,)))
    scales = ScaleGrid(d["t_min"], d["t_max"], d["K"])
    arr = vals.reshape(grid.shape + (d["K"], space.dim))
    return HalfSpaceField(grid, scales, space, np.moveaxis(arr, grid.n, 0))


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_obj(obj), fh)


def read_json(path):
    with open(path) as fh:
        return from_json_obj(json.load(fh))
