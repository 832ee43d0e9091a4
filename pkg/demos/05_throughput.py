"""
Resampling throughput
=====================

Images per second for square-to-hex, hex-to-square, and a square resize
with the same number of output samples.
"""

import numpy as np

from hexlattice.bench import run_bench
from hexlattice.transform import choose_grid

rng = np.random.default_rng(0)
images = [rng.uniform(0, 255, (128, 128, 3)) for _ in range(20)]
for mode in ("nearest", "bilinear", "bicubic"):
    for rep in run_bench(images, choose_grid(128, 128), mode, runs=5):
        print(f"{mode:9s} {rep.operation:14s} {rep.images_per_second:8.1f} img/s  (sd {rep.stddev:.1f})")
