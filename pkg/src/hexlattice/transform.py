"""Square image <-> hexagonal lattice resampling."""

from __future__ import annotations

import math
from enum import Enum
from functools import lru_cache

import numpy as np

from .hexgrid import SQRT3, HexArray, HexGridSpec, center_positions, locate


class InterpMode(str, Enum):
    NEAREST = "nearest"
    BILINEAR = "bilinear"
    BICUBIC = "bicubic"


def as_image(img) -> np.ndarray:
    """Coerce to a float64 ``(height, width, channels)`` array."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 2:
        a = a[:, :, None]
    if a.ndim != 3 or a.size == 0:
        raise ValueError(f"expected a non-empty (H, W[, C]) image, got shape {np.shape(img)}")
    return a


def choose_grid(width: int, height: int) -> HexGridSpec:
    """Hex grid holding (about) as many samples as a ``width x height`` image.

    Rows are stretched by sqrt(2/sqrt(3)) and columns shrunk by sqrt(sqrt(3)/2),
    so rows * cols ~= width * height. The pitch makes the grid as wide as the
    image.
    """
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be >= 1")
    rows = max(1, round(height * math.sqrt(2.0 / SQRT3)))
    cols = max(1, round(width * math.sqrt(SQRT3 / 2.0)))
    pitch = width / (cols + (0.5 if rows > 1 else 0.0))
    return HexGridSpec(rows, cols, pitch)


def grid_for_radius(width: int, height: int, radius: float) -> HexGridSpec | None:
    """Grid of hexagons with circumradius ``radius`` covering the image.

    Returns ``None`` if the radius is too large for even one row or column.
    """
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    pitch = radius * SQRT3
    cols = round(width / pitch)
    rows = round(height / (1.5 * radius))
    if rows < 1 or cols < 1:
        return None
    return HexGridSpec(rows, cols, pitch)


def grid_origin(spec: HexGridSpec, width: int, height: int) -> tuple[float, float]:
    """Image-space position of cell (0, 0)'s center when the grid is centered."""
    xmin, ymin, xmax, ymax = spec.bounding_box()
    return width / 2.0 - (xmin + xmax) / 2.0, height / 2.0 - (ymin + ymax) / 2.0


@lru_cache(maxsize=64)
def _hex_sample_points(spec: HexGridSpec, width: int, height: int):
    cx, cy = center_positions(spec)
    ox, oy = grid_origin(spec, width, height)
    x, y = cx + ox, cy + oy
    x.setflags(write=False)
    y.setflags(write=False)
    return x, y


def hex_sample_points(spec: HexGridSpec, width: int, height: int):
    """Image-space (x, y) of every hexagon center, each ``(rows, cols)``."""
    return _hex_sample_points(spec, int(width), int(height))


# --- square-lattice samplers ---------------------------------------------
# Pixel (i, j) covers [j, j+1) x [i, i+1); its center is at (j + .5, i + .5).


def _catmull_rom(t):
    t = np.abs(t)
    t2, t3 = t * t, t * t * t
    return np.where(
        t <= 1.0,
        1.5 * t3 - 2.5 * t2 + 1.0,
        np.where(t < 2.0, -0.5 * t3 + 2.5 * t2 - 4.0 * t + 2.0, 0.0),
    )


def sample_image(img: np.ndarray, x, y, mode: InterpMode | str = InterpMode.BILINEAR) -> np.ndarray:
    """Interpolate ``img`` at image-space points; returns ``x.shape + (C,)``.

    Edges are clamped. Results are clipped to [0, 255].
    """
    img = as_image(img)
    mode = InterpMode(mode)
    h, w, _ = img.shape
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)

    if mode is InterpMode.NEAREST:
        j = np.clip(np.floor(x).astype(np.int64), 0, w - 1)
        i = np.clip(np.floor(y).astype(np.int64), 0, h - 1)
        out = img[i, j]
    elif mode is InterpMode.BILINEAR:
        u = x - 0.5
        v = y - 0.5
        j0 = np.floor(u)
        i0 = np.floor(v)
        fu = (u - j0)[..., None]
        fv = (v - i0)[..., None]
        j0 = j0.astype(np.int64)
        i0 = i0.astype(np.int64)
        ja, jb = np.clip(j0, 0, w - 1), np.clip(j0 + 1, 0, w - 1)
        ia, ib = np.clip(i0, 0, h - 1), np.clip(i0 + 1, 0, h - 1)
        top = img[ia, ja] * (1.0 - fu) + img[ia, jb] * fu
        bot = img[ib, ja] * (1.0 - fu) + img[ib, jb] * fu
        out = top * (1.0 - fv) + bot * fv
    else:
        u = x - 0.5
        v = y - 0.5
        j0 = np.floor(u).astype(np.int64)
        i0 = np.floor(v).astype(np.int64)
        fu = u - j0
        fv = v - i0
        out = 0.0
        for a in range(-1, 3):
            wy = _catmull_rom(fv - a)[..., None]
            ii = np.clip(i0 + a, 0, h - 1)
            row = 0.0
            for b in range(-1, 3):
                wx = _catmull_rom(fu - b)[..., None]
                row = row + wx * img[ii, np.clip(j0 + b, 0, w - 1)]
            out = out + wy * row
    return np.clip(out, 0.0, 255.0)


def s2h(img, spec: HexGridSpec | None = None, mode: InterpMode | str = InterpMode.BILINEAR) -> HexArray:
    """Resample a square-lattice image onto a hexagonal grid.

    The grid's bounding box is centered on the image and every hexagon takes
    the interpolated value at its center. With no ``spec`` the grid is sized by
    :func:`choose_grid`.
    """
    img = as_image(img)
    h, w, _ = img.shape
    if spec is None:
        spec = choose_grid(w, h)
    x, y = hex_sample_points(spec, w, h)
    return HexArray(spec, sample_image(img, x, y, mode))


def square_sample_points(out_width: int, out_height: int, width: int, height: int):
    """Centers of an ``out_height x out_width`` square grid spanning the image."""
    sx = width / out_width
    sy = height / out_height
    x = (np.arange(out_width) + 0.5) * sx
    y = (np.arange(out_height) + 0.5) * sy
    return np.meshgrid(x, y)


def resize(img, out_width: int, out_height: int, mode: InterpMode | str = InterpMode.BILINEAR) -> np.ndarray:
    """Square-to-square resampling by point sampling at the new pixel centers."""
    img = as_image(img)
    if out_width < 1 or out_height < 1:
        raise ValueError("output size must be >= 1")
    h, w, _ = img.shape
    x, y = _square_points_cached(int(out_width), int(out_height), w, h)
    return sample_image(img, x, y, mode)


@lru_cache(maxsize=64)
def _square_points_cached(ow, oh, w, h):
    x, y = square_sample_points(ow, oh, w, h)
    x.setflags(write=False)
    y.setflags(write=False)
    return x, y


def equal_count_size(width: int, height: int, samples: int) -> tuple[int, int]:
    """Square output size (w, h) with about ``samples`` pixels and the same aspect."""
    side = math.sqrt(width * height / samples)
    return max(1, round(width / side)), max(1, round(height / side))


# --- hex -> square ----------------------------------------------------------


def h2s(hexarr: HexArray, width: int, height: int, mode: InterpMode | str = InterpMode.BILINEAR) -> np.ndarray:
    """Resample a hexagonal grid back onto a ``height x width`` image.

    ``nearest`` takes the hexagon containing each pixel center (clamped to the
    grid). ``bilinear`` interpolates barycentrically on the triangles formed by
    three mutually adjacent centers. ``bicubic`` has no hexagonal counterpart
    here and behaves as ``bilinear``.
    """
    if hexarr.data.size == 0:
        raise ValueError("empty HexArray")
    if width < 1 or height < 1:
        raise ValueError("output size must be >= 1")
    mode = InterpMode(mode)
    spec = hexarr.spec
    data = hexarr.data
    ox, oy = grid_origin(spec, width, height)
    px, py = np.meshgrid(np.arange(width) + 0.5 - ox, np.arange(height) + 0.5 - oy)

    if mode is InterpMode.NEAREST:
        r, c = locate(px, py, spec)
        r = np.clip(r, 0, spec.rows - 1)
        c = np.clip(c, 0, spec.cols - 1)
        return data[r, c].copy()

    # Fractional axial coordinates; the center lattice is affine in them so
    # barycentric weights on a lattice triangle are plain linear weights.
    fr = py / spec.row_spacing
    fq = px / spec.pitch - fr / 2.0
    q0 = np.floor(fq)
    r0 = np.floor(fr)
    a = fq - q0
    b = fr - r0
    q0 = q0.astype(np.int64)
    r0 = r0.astype(np.int64)
    upper = a + b > 1.0

    def fetch(q, r):
        row = np.clip(r, 0, spec.rows - 1)
        col = np.clip(q + (r >> 1), 0, spec.cols - 1)
        return data[row, col]

    v10 = fetch(q0 + 1, r0)
    v01 = fetch(q0, r0 + 1)
    v00 = fetch(q0, r0)
    v11 = fetch(q0 + 1, r0 + 1)
    a = a[..., None]
    b = b[..., None]
    lower_val = (1.0 - a - b) * v00 + a * v10 + b * v01
    upper_val = (a + b - 1.0) * v11 + (1.0 - b) * v10 + (1.0 - a) * v01
    out = np.where(upper[..., None], upper_val, lower_val)
    return np.clip(out, 0.0, 255.0)
