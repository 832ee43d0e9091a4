"""Transformation throughput in images per second."""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .hexgrid import HexGridSpec
from .transform import InterpMode, equal_count_size, h2s, resize, s2h


@dataclass
class BenchReport:
    operation: str
    images_per_second: float
    stddev: float
    runs: int
    warmup: int
    input: str

    def as_dict(self):
        return asdict(self)


def _time_runs(fn, images, runs, warmup, threads):
    def batch():
        if threads > 1:
            with ThreadPoolExecutor(threads) as ex:
                list(ex.map(fn, images))
        else:
            for im in images:
                fn(im)

    for _ in range(warmup):
        batch()
    rates = []
    for _ in range(runs):
        t0 = time.perf_counter()
        batch()
        rates.append(len(images) / (time.perf_counter() - t0))
    return rates


def run_bench(images, spec: HexGridSpec, mode=InterpMode.BILINEAR, runs: int = 5,
              warmup: int = 1, threads: int = 1) -> list[BenchReport]:
    """Benchmark s2h, h2s and an equal-sample-count square resize on ``images``.

    All three operations see the same images and run counts. Decoding is not
    timed.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if not images:
        raise ValueError("no images to benchmark")
    images = [np.asarray(im, dtype=np.float64) for im in images]
    h, w = images[0].shape[:2]
    if any(im.shape[:2] != (h, w) for im in images):
        raise ValueError("benchmark images must share one size")
    qw, qh = equal_count_size(w, h, spec.size)
    hexed = [s2h(im, spec, mode) for im in images]
    desc = f"{len(images)} images {w}x{h} -> hex {spec.rows}x{spec.cols}, square {qw}x{qh}"
    cases = [
        ("s2h", lambda im: s2h(im, spec, mode), images),
        ("h2s", lambda hx: h2s(hx, w, h, mode), hexed),
        ("square-resize", lambda im: resize(im, qw, qh, mode), images),
    ]
    reports = []
    for name, fn, inputs in cases:
        rates = _time_runs(fn, inputs, runs, warmup, threads)
        sd = statistics.stdev(rates) if len(rates) > 1 else 0.0
        reports.append(BenchReport(name, statistics.fmean(rates), sd, runs, warmup, desc))
    return reports
