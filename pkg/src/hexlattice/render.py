"""CPU rasterisation of hexagonal grids for inspection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hexgrid import HexArray, locate


@dataclass(frozen=True)
class RenderOptions:
    scale: float = 10.0        # output pixels per pitch
    supersample: int = 1       # sub-samples per axis: 1, 2 or 4
    background: float = 0.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.supersample not in (1, 2, 4):
            raise ValueError(f"supersample must be 1, 2 or 4, got {self.supersample}")


def canvas_size(hexarr: HexArray, opts: RenderOptions) -> tuple[int, int]:
    xmin, ymin, xmax, ymax = hexarr.spec.bounding_box()
    unit = opts.scale / hexarr.spec.pitch
    return math.ceil((xmax - xmin) * unit - 1e-9), math.ceil((ymax - ymin) * unit - 1e-9)


def rasterize(hexarr: HexArray, opts: RenderOptions = RenderOptions()) -> np.ndarray:
    """Render to an ``(H, W, C)`` image sized to the grid's bounding box.

    Each output pixel averages ``supersample**2`` sub-pixel samples; a sample
    takes the value of the hexagon containing it, or the background outside
    the grid.
    """
    if hexarr.data.size == 0:
        raise ValueError("empty HexArray")
    spec = hexarr.spec
    width, height = canvas_size(hexarr, opts)
    if width < 1 or height < 1:
        raise ValueError("canvas would be empty; increase scale")
    xmin, ymin, _, _ = spec.bounding_box()
    unit = spec.pitch / opts.scale  # grid units per output pixel
    ss = opts.supersample
    sub = (np.arange(ss) + 0.5) / ss
    out = np.zeros((height, width, hexarr.channels))
    for sy in sub:
        y = ymin + (np.arange(height) + sy) * unit
        for sx in sub:
            x = xmin + (np.arange(width) + sx) * unit
            gx, gy = np.meshgrid(x, y)
            r, c = locate(gx, gy, spec)
            inside = (r >= 0) & (r < spec.rows) & (c >= 0) & (c < spec.cols)
            vals = hexarr.data[np.clip(r, 0, spec.rows - 1), np.clip(c, 0, spec.cols - 1)]
            out += np.where(inside[..., None], vals, opts.background)
    return out / (ss * ss)
