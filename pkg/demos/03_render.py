"""
Looking at a hexagonal grid
===========================

Rasterise a hexagonal image to PNG so the cells are visible.
"""

import sys
from pathlib import Path

import numpy as np

from hexlattice.io import write_hexa, write_image
from hexlattice.render import RenderOptions, rasterize
from hexlattice.transform import grid_for_radius, s2h

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

n = 96
y, x = np.mgrid[0:n, 0:n] + 0.5
img = np.stack([
    127.5 + 127 * np.cos(np.hypot(x - n / 2, y - n / 2) / 4),
    255 * x / n,
    255 * y / n,
], axis=-1)

hx = s2h(img, grid_for_radius(n, n, 3.0))
write_hexa(out / "rings.hexa", hx)
picture = rasterize(hx, RenderOptions(scale=12, supersample=4))
write_image(out / "rings.png", picture)
write_image(out / "rings_input.png", img)
print(f"{hx.spec.rows}x{hx.spec.cols} cells -> {picture.shape[1]}x{picture.shape[0]} PNG in {out}/")
