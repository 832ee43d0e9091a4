"""HXNN weights file.

Layout (all little-endian)::

    magic        4 bytes   b"HXNN"
    version      u16       1
    layer count  u32       number of layers that own parameters
    tensor count u32
    then per tensor:
      name length u32, name (UTF-8, "<layer>/<param>")
      ndim u32, dims u64 * ndim
      payload     f64 * prod(dims), C order
"""

from __future__ import annotations

import struct

import numpy as np

from ..io import FormatError
from .model import Model, ModelSpec, ShapeError

MAGIC = b"HXNN"
VERSION = 1


def save_weights(path, params: dict) -> None:
    tensors = [(f"{layer}/{name}", arr) for layer, p in params.items() for name, arr in p.items()]
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<HII", VERSION, len(params), len(tensors)))
        for name, arr in tensors:
            raw = name.encode("utf-8")
            arr = np.ascontiguousarray(arr, dtype="<f8")
            f.write(struct.pack("<I", len(raw)))
            f.write(raw)
            f.write(struct.pack("<I", arr.ndim))
            f.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            f.write(arr.tobytes())


def load_weights(path) -> dict:
    with open(path, "rb") as f:
        buf = f.read()
    pos = 0

    def take(n):
        nonlocal pos
        if pos + n > len(buf):
            raise FormatError(f"truncated weights file (need {n} bytes)", pos)
        chunk = buf[pos : pos + n]
        pos += n
        return chunk

    if take(4) != MAGIC:
        raise FormatError("bad magic, expected HXNN", 0)
    version, _layers, count = struct.unpack("<HII", take(10))
    if version != VERSION:
        raise FormatError(f"unsupported HXNN version {version}", 4)
    params: dict = {}
    for _ in range(count):
        (n,) = struct.unpack("<I", take(4))
        name = take(n).decode("utf-8")
        (ndim,) = struct.unpack("<I", take(4))
        dims = struct.unpack(f"<{ndim}Q", take(8 * ndim))
        size = int(np.prod(dims)) if dims else 1
        arr = np.frombuffer(take(8 * size), dtype="<f8").reshape(dims).astype(np.float64)
        layer, _, pname = name.rpartition("/")
        params.setdefault(layer, {})[pname] = arr
    if pos != len(buf):
        raise FormatError("trailing bytes after last tensor", pos)
    return params


def load_model(path, spec: ModelSpec) -> Model:
    """Load weights and check them against ``spec``'s expected shapes."""
    params = load_weights(path)
    expected = Model.init(spec, 0).params
    for layer, p in expected.items():
        if layer not in params:
            raise ShapeError(layer, "missing from weights file")
        for name, arr in p.items():
            got = params[layer].get(name)
            if got is None or got.shape != arr.shape:
                raise ShapeError(layer, f"{name} has shape {None if got is None else got.shape}, expected {arr.shape}")
    extra = set(params) - set(expected)
    if extra:
        raise ShapeError(sorted(extra)[0], "not part of this model")
    return Model(spec, params)
