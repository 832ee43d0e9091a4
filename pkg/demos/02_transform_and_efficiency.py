"""
Square to hexagonal resampling and transformation efficiency
============================================================

An image is resampled onto a hexagonal grid and back, then scored by
PSNR computed from exact hexagon/pixel overlap areas. Sweeping the
hexagon size compares the hexagonal lattice with a square one holding the
same number of samples.
"""

import numpy as np

from hexlattice.metrics import efficiency_sweep, psnr, weighted_mse
from hexlattice.transform import choose_grid, h2s, s2h

n = 128
y, x = np.mgrid[0:n, 0:n] + 0.5
r = np.hypot(x - n / 2, y - n / 2)
smooth = 255.0 * np.clip(r / (n / np.sqrt(2)), 0, 1)
stripes = np.tile(255.0 * (np.arange(n) % 2), (n, 1))

# A grid with about as many hexagons as the image has pixels.
grid = choose_grid(n, n)
print(f"{n}x{n} image -> {grid.rows}x{grid.cols} hexagons, pitch {grid.pitch:.3f}")

for mode in ("nearest", "bilinear", "bicubic"):
    hx = s2h(smooth, grid, mode)
    back = h2s(hx, n, n, mode)
    t_h = psnr(weighted_mse(smooth, hx))
    rt = psnr(float(np.mean((back[..., 0] - smooth) ** 2)))
    print(f"{mode:9s} T_h = {t_h:6.2f} dB   round trip PSNR = {rt:6.2f} dB")

# Delta T = T_h - T_q over hexagon circumradius R (in pixels).
radii = [1 / np.sqrt(3), 0.8, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0]
print("\n     R   dT(smooth)  dT(stripes)")
for a, b in zip(efficiency_sweep(smooth, radii), efficiency_sweep(stripes, radii)):
    print(f"{a.R:6.3f}  {a.delta:+9.3f}  {b.delta:+10.3f}")
# The smooth radial image favours the hexagonal lattice at every R above
# pixel scale. The period-2 stripes sit at the sampling limit, so their sign
# flips with R as they alias differently on the two lattices. At pixel
# scale the square lattice reproduces the image exactly and wins both.
