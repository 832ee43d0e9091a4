"""Turning raw image sets into network inputs for the square and hex models."""

from __future__ import annotations

import numpy as np

from .hexgrid import HexGridSpec
from .transform import InterpMode, choose_grid, resize, s2h


def to_square(images, size: int = 32) -> np.ndarray:
    """``(N, H, W[, C])`` 8-bit images -> ``(N, size, size, C)`` floats in [0, 1].

    Smaller images are zero-padded symmetrically (28x28 MNIST -> 32x32);
    larger or non-square ones are resampled bilinearly.
    """
    x = np.asarray(images, dtype=np.float64)
    if x.ndim == 3:
        x = x[..., None]
    n, h, w, c = x.shape
    if h <= size and w <= size:
        top, left = (size - h) // 2, (size - w) // 2
        out = np.zeros((n, size, size, c))
        out[:, top : top + h, left : left + w] = x
    else:
        # Channels of all images resampled together in one call.
        stacked = x.transpose(1, 2, 0, 3).reshape(h, w, n * c)
        out = resize(stacked, size, size).reshape(size, size, n, c).transpose(2, 0, 1, 3)
    return out / 255.0


def to_hex(square, spec: HexGridSpec | None = None, mode=InterpMode.BILINEAR) -> np.ndarray:
    """``(N, H, W, C)`` square inputs in [0, 1] -> ``(N, rows, cols, C)`` hex inputs."""
    x = np.asarray(square, dtype=np.float64)
    n, h, w, c = x.shape
    spec = spec or choose_grid(w, h)
    stacked = x.transpose(1, 2, 0, 3).reshape(h, w, n * c) * 255.0
    hexarr = s2h(stacked, spec, mode)
    return hexarr.data.reshape(spec.rows, spec.cols, n, c).transpose(2, 0, 1, 3) / 255.0


def stratified_split(labels, n_train: int, n_test: int, seed: int = 0):
    """Disjoint index sets with (near) equal class counts, shuffled by ``seed``."""
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    classes = np.unique(labels)
    per_train = n_train // len(classes)
    per_test = n_test // len(classes)
    train, test = [], []
    for k in classes:
        idx = rng.permutation(np.flatnonzero(labels == k))
        if len(idx) < per_train + per_test:
            raise ValueError(f"class {k} has only {len(idx)} samples")
        train.extend(idx[:per_train])
        test.extend(idx[per_train : per_train + per_test])
    return rng.permutation(np.array(train)), rng.permutation(np.array(test))
