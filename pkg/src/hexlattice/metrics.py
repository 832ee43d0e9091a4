"""Area-weighted transformation quality: subarea MSE, PSNR, and the R sweep.

The reference image I and a transformed lattice K are overlaid; every
non-empty intersection of a K cell with an I pixel is a subarea ``a`` with
area ``|a|``. The error is the area-weighted mean of ``(I(a) - K(a))**2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .hexgrid import HexArray, HexGridSpec, center_positions
from .transform import (
    InterpMode,
    as_image,
    equal_count_size,
    grid_for_radius,
    grid_origin,
    resize,
    s2h,
)

log = logging.getLogger(__name__)

MAX_I = 255.0


class UndefinedMetricError(ValueError):
    """The two lattices do not overlap, so the error has no normalizer."""


# --- polygons ---------------------------------------------------------------


def polygon_area(poly) -> float:
    """Shoelace area; positive for counterclockwise vertex order."""
    n = len(poly)
    if n < 3:
        return 0.0
    s = 0.0
    for k in range(n):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def clip_convex(subject, rect) -> list[tuple[float, float]]:
    """Sutherland-Hodgman clip of a convex CCW polygon to ``(x0, y0, x1, y1)``."""
    if len(subject) < 3:
        return []
    x0, y0, x1, y1 = rect
    # (axis, bound, keep-below)
    planes = ((0, x0, False), (0, x1, True), (1, y0, False), (1, y1, True))
    out = [tuple(map(float, p)) for p in subject]
    for axis, bound, below in planes:
        if not out:
            break

        def inside(p):
            return p[axis] <= bound if below else p[axis] >= bound

        src, out = out, []
        prev = src[-1]
        for cur in src:
            cin, pin = inside(cur), inside(prev)
            if cin != pin:
                t = (bound - prev[axis]) / (cur[axis] - prev[axis])
                pt = [prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])]
                pt[axis] = bound
                out.append(tuple(pt))
            if cin:
                out.append(cur)
            prev = cur
    return out if len(out) >= 3 else []


def _clip_batch_halfplane(px, py, axis, bound, below):
    """Clip a batch of convex polygons ``(K, V)`` against one axis-aligned half-plane.

    Unused slots hold copies of a real vertex; the resulting zero-length edges
    change neither the clipping nor the shoelace sum. Returns arrays one slot
    wider plus a per-polygon "still non-empty" mask.
    """
    coord = px if axis == 0 else py
    inside = (coord <= bound) if below else (coord >= bound)
    nx, ny = np.roll(px, -1, axis=1), np.roll(py, -1, axis=1)
    ncoord = nx if axis == 0 else ny
    cross = inside != np.roll(inside, -1, axis=1)
    denom = np.where(cross, ncoord - coord, 1.0)
    t = (bound - coord) / denom
    ix = px + t * (nx - px)
    iy = py + t * (ny - py)
    if axis == 0:
        ix = np.where(cross, bound, ix)
    else:
        iy = np.where(cross, bound, iy)
    # Per vertex: emit it if inside, then the crossing towards its successor.
    K, V = px.shape
    ox = np.stack([px, ix], axis=2).reshape(K, 2 * V)
    oy = np.stack([py, iy], axis=2).reshape(K, 2 * V)
    ok = np.stack([inside, cross], axis=2).reshape(K, 2 * V)
    order = np.argsort(~ok, axis=1, kind="stable")[:, : V + 1]
    ox = np.take_along_axis(ox, order, axis=1)
    oy = np.take_along_axis(oy, order, axis=1)
    ok = np.take_along_axis(ok, order, axis=1)
    ox = np.where(ok, ox, ox[:, :1])
    oy = np.where(ok, oy, oy[:, :1])
    return ox, oy, ok[:, 0]


def clip_areas_batch(px, py, rects) -> np.ndarray:
    """Areas of convex CCW polygons ``(K, V)`` clipped to rectangles ``(K, 4)``."""
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    rects = np.asarray(rects, dtype=np.float64)
    nonempty = np.ones(px.shape[0], dtype=bool)
    for axis, col, below in ((0, 0, False), (0, 2, True), (1, 1, False), (1, 3, True)):
        px, py, ne = _clip_batch_halfplane(px, py, axis, rects[:, col : col + 1], below)
        nonempty &= ne
    area = 0.5 * np.sum(px * np.roll(py, -1, axis=1) - np.roll(px, -1, axis=1) * py, axis=1)
    return np.where(nonempty, np.maximum(area, 0.0), 0.0)


# --- subareas ---------------------------------------------------------------


@dataclass
class Subareas:
    """All (hexagon, pixel) intersection cells of a registered grid/image pair.

    Arrays are aligned: ``hex_row[k], hex_col[k]`` intersects pixel
    ``pix_row[k], pix_col[k]`` with area ``area[k]``.
    """

    hex_row: np.ndarray
    hex_col: np.ndarray
    pix_row: np.ndarray
    pix_col: np.ndarray
    area: np.ndarray


def hex_subareas(spec: HexGridSpec, width: int, height: int) -> Subareas:
    """Intersections of every hexagon with every image pixel it overlaps.

    The grid is registered as :func:`~hexlattice.transform.s2h` places it.
    Parts of boundary hexagons outside the image are dropped.
    """
    R = spec.circumradius
    cx, cy = center_positions(spec)
    ox, oy = grid_origin(spec, width, height)
    cx = (cx + ox).ravel()
    cy = (cy + oy).ravel()
    n_hex = cx.size
    hr, hc = np.divmod(np.arange(n_hex), spec.cols)

    ang = np.radians(30.0 + 60.0 * np.arange(6))
    vx = R * np.cos(ang)
    vy = R * np.sin(ang)
    half_w = spec.pitch / 2.0

    jx0 = np.floor(cx - half_w).astype(np.int64)
    iy0 = np.floor(cy - R).astype(np.int64)
    nx = int(math.ceil(2 * half_w)) + 1
    ny = int(math.ceil(2 * R)) + 1
    dj, di = np.meshgrid(np.arange(nx), np.arange(ny))
    dj, di = dj.ravel(), di.ravel()

    hex_idx = np.repeat(np.arange(n_hex), dj.size)
    pj = (jx0[:, None] + dj[None, :]).ravel()
    pi = (iy0[:, None] + di[None, :]).ravel()
    keep = (pj >= 0) & (pj < width) & (pi >= 0) & (pi < height)
    # Cheap bounding-box reject before clipping.
    keep &= (pj + 1 > cx[hex_idx] - half_w) & (pj < cx[hex_idx] + half_w)
    keep &= (pi + 1 > cy[hex_idx] - R) & (pi < cy[hex_idx] + R)
    hex_idx, pj, pi = hex_idx[keep], pj[keep], pi[keep]

    area = np.empty(hex_idx.size)
    chunk = 1 << 16
    for s in range(0, hex_idx.size, chunk):
        h = hex_idx[s : s + chunk]
        polys_x = cx[h, None] + vx[None, :]
        polys_y = cy[h, None] + vy[None, :]
        rects = np.stack([pj[s : s + chunk], pi[s : s + chunk],
                          pj[s : s + chunk] + 1, pi[s : s + chunk] + 1], axis=1)
        area[s : s + chunk] = clip_areas_batch(polys_x, polys_y, rects)

    nz = area > 0
    return Subareas(hr[hex_idx[nz]], hc[hex_idx[nz]], pi[nz], pj[nz], area[nz])


def _weighted_mean(area, sq_err, normalize: str) -> float:
    total = area.sum()
    if not total > 0:
        raise UndefinedMetricError("lattices do not overlap")
    if normalize == "area":
        return float(np.dot(area, sq_err) / total)
    if normalize == "count":
        return float(np.dot(area, sq_err) / area.size)
    raise ValueError(f"unknown normalization {normalize!r}")


def weighted_mse(img, hexarr: HexArray, normalize: str = "area") -> float:
    """Subarea-weighted MSE between an image and a registered hex grid.

    ``normalize="area"`` divides by the total overlap area (an area-weighted
    mean); ``"count"`` divides by the number of subareas instead. Channels are
    averaged.
    """
    img = as_image(img)
    h, w, c = img.shape
    if hexarr.channels != c:
        raise ValueError(f"channel mismatch: image {c}, hex {hexarr.channels}")
    sub = hex_subareas(hexarr.spec, w, h)
    if sub.area.size == 0:
        raise UndefinedMetricError("hex grid does not overlap the image")
    diff = img[sub.pix_row, sub.pix_col] - hexarr.data[sub.hex_row, sub.hex_col]
    return _weighted_mean(sub.area, np.mean(diff * diff, axis=1), normalize)


def _overlap_matrix(n_fine: int, n_coarse: int, extent: float) -> np.ndarray:
    """Overlap lengths between unit cells [0, n_fine) and ``n_coarse`` equal cells."""
    edges = np.linspace(0.0, extent, n_coarse + 1)
    lo = np.maximum(np.arange(n_fine)[:, None], edges[None, :-1])
    hi = np.minimum(np.arange(n_fine)[:, None] + 1.0, edges[None, 1:])
    return np.clip(hi - lo, 0.0, None)


def square_weighted_mse(img, resized, normalize: str = "area") -> float:
    """Subarea-weighted MSE of a square resampling spanning the same extent.

    Square-on-square overlaps are separable, so the sum is evaluated exactly
    with two overlap matrices instead of explicit polygon clipping.
    """
    img = as_image(img)
    k = as_image(resized)
    h, w, c = img.shape
    kh, kw, kc = k.shape
    if kc != c:
        raise ValueError("channel mismatch")
    ax = _overlap_matrix(w, kw, w)  # (w, kw)
    ay = _overlap_matrix(h, kh, h)  # (h, kh)
    if normalize == "count":
        nz_y, nz_x = ay > 0, ax > 0
        iy, ly = np.nonzero(nz_y)
        ix, lx = np.nonzero(nz_x)
        area = (ay[iy, ly][:, None] * ax[ix, lx][None, :]).ravel()
        diff = img[iy][:, ix] - k[ly][:, lx]
        return _weighted_mean(area, np.mean(diff * diff, axis=2).ravel(), "count")
    total = ay.sum() * ax.sum()
    if not total > 0:
        raise UndefinedMetricError("lattices do not overlap")
    errs = []
    wy, wx = ay.sum(axis=1), ax.sum(axis=1)
    vy, vx = ay.sum(axis=0), ax.sum(axis=0)
    for ch in range(c):
        I, K = img[:, :, ch], k[:, :, ch]
        t1 = np.einsum("ij,i,j->", I * I, wy, wx)
        t2 = np.sum(I * (ay @ K @ ax.T))
        t3 = np.einsum("ij,i,j->", K * K, vy, vx)
        errs.append((t1 - 2.0 * t2 + t3) / total)
    return float(max(np.mean(errs), 0.0))


def psnr(mse: float, max_i: float = MAX_I) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for a perfect match."""
    if mse < 0:
        raise ValueError(f"mse must be non-negative, got {mse}")
    if not max_i > 0:
        raise ValueError(f"max_i must be positive, got {max_i}")
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(max_i * max_i / mse)


# --- efficiency sweep -------------------------------------------------------


@dataclass
class EfficiencyReport:
    R: float
    T_q: float
    T_h: float
    delta: float
    mse_q: float
    mse_h: float
    MAX_I: float = MAX_I
    hex_shape: Optional[tuple[int, int]] = None
    square_shape: Optional[tuple[int, int]] = None
    warning: Optional[str] = None

    @property
    def skipped(self) -> bool:
        return self.warning is not None


def _delta(t_h: float, t_q: float) -> float:
    if math.isinf(t_h) and math.isinf(t_q):
        return 0.0 if t_h == t_q else t_h - t_q
    return t_h - t_q


def efficiency_at(img, spec: HexGridSpec, mode: InterpMode | str = InterpMode.BILINEAR,
                  max_i: float = MAX_I, normalize: str = "area") -> EfficiencyReport:
    """Hex vs square transformation efficiency for one hex grid."""
    img = as_image(img)
    h, w, _ = img.shape
    hexarr = s2h(img, spec, mode)
    mse_h = weighted_mse(img, hexarr, normalize)
    qw, qh = equal_count_size(w, h, spec.size)
    mse_q = square_weighted_mse(img, resize(img, qw, qh, mode), normalize)
    t_h, t_q = psnr(mse_h, max_i), psnr(mse_q, max_i)
    return EfficiencyReport(
        R=spec.circumradius, T_q=t_q, T_h=t_h, delta=_delta(t_h, t_q),
        mse_q=mse_q, mse_h=mse_h, MAX_I=max_i,
        hex_shape=(spec.rows, spec.cols), square_shape=(qh, qw),
    )


def efficiency_sweep(img, R_values: Iterable[float], mode: InterpMode | str = InterpMode.BILINEAR,
                     max_i: float = MAX_I, normalize: str = "area") -> list[EfficiencyReport]:
    """One :class:`EfficiencyReport` per circumradius (in pixel units)."""
    img = as_image(img)
    h, w, _ = img.shape
    out = []
    for R in R_values:
        if not R > 0:
            raise ValueError(f"radius must be positive, got {R}")
        spec = grid_for_radius(w, h, R)
        if spec is None:
            msg = f"R={R} leaves no hexagon on a {w}x{h} image"
            log.warning(msg)
            nan = math.nan
            out.append(EfficiencyReport(R, nan, nan, nan, nan, nan, max_i, warning=msg))
            continue
        report = efficiency_at(img, spec, mode, max_i, normalize)
        report.R = float(R)  # the requested radius, not its float round trip via pitch
        out.append(report)
    return out
