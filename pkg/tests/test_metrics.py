import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexlattice.hexgrid import HexArray, HexGridSpec, hexagon_vertices
from hexlattice.metrics import (
    UndefinedMetricError,
    clip_areas_batch,
    clip_convex,
    efficiency_at,
    efficiency_sweep,
    hex_subareas,
    polygon_area,
    psnr,
    square_weighted_mse,
    weighted_mse,
)
from hexlattice.transform import choose_grid, grid_for_radius, hex_sample_points, resize, s2h

shapely = pytest.importorskip("shapely.geometry")
unary_union = pytest.importorskip("shapely.ops").unary_union


def test_polygon_area_orientation():
    sq = [(0, 0), (2, 0), (2, 1), (0, 1)]
    assert polygon_area(sq) == 2.0
    assert polygon_area(sq[::-1]) == -2.0
    assert polygon_area(sq[:2]) == 0.0


def test_clip_convex_cases():
    hexagon = hexagon_vertices(0.0, 0.0, 1.0)
    full = clip_convex(hexagon, (-5, -5, 5, 5))
    assert polygon_area(full) == pytest.approx(polygon_area(hexagon))
    assert clip_convex(hexagon, (3, 3, 4, 4)) == []
    # The inradius is sqrt(3)/2, so a centered unit square lies fully inside.
    inner = clip_convex(hexagon, (-0.5, -0.5, 0.5, 0.5))
    assert polygon_area(inner) == pytest.approx(1.0)


# GEOS mis-clips when a coordinate is near the underflow limit (x0 = 2e-311,
# y0 = 2.2e-308 both give wrong areas), so such values are snapped to 0.
def _no_underflow(lo, hi):
    return st.floats(lo, hi).map(lambda v: 0.0 if abs(v) < 1e-200 else v)


_center = _no_underflow(-2, 2)
_coord = _no_underflow(-3, 2)
convex = st.builds(
    lambda cx, cy, r, rot, n: [
        (cx + r * math.cos(rot + 2 * math.pi * k / n), cy + r * math.sin(rot + 2 * math.pi * k / n))
        for k in range(n)
    ],
    _center, _center, st.floats(0.05, 3), st.floats(0, 2 * math.pi), st.integers(3, 8),
)
rects = st.tuples(_coord, _coord, st.floats(0.01, 3), st.floats(0.01, 3)).map(
    lambda t: (t[0], t[1], t[0] + t[2], t[1] + t[3]))


@settings(max_examples=300, deadline=None)
@given(convex, rects)
def test_clip_area_matches_shapely(poly, rect):
    want = shapely.Polygon(poly).intersection(shapely.box(*rect)).area
    assert polygon_area(clip_convex(poly, rect)) == pytest.approx(want, abs=1e-9)


def test_clip_area_near_underflow():
    tri = [(0.033768894116758735, 0.05259193655049353), (-0.0624304001453261, 0.0029487518875731845),
           (0.028661506028567346, -0.05554068843806671)]
    want = polygon_area(clip_convex(tri, (0.0, 0.0, 1.0, 1.0)))
    got = polygon_area(clip_convex(tri, (0.0, 2.2250738585072014e-308, 1.0, 1.0)))
    assert got == pytest.approx(want, abs=1e-15)
    assert want == pytest.approx(0.0014164178615197, abs=1e-12)


def test_batch_clipper_matches_scalar():
    rng = np.random.default_rng(0)
    K = 500
    R = rng.uniform(0.3, 2.0, K)
    cx, cy = rng.uniform(-1, 2, K), rng.uniform(-1, 2, K)
    polys = [hexagon_vertices(cx[k], cy[k], R[k]) for k in range(K)]
    px = np.array([[p[0] for p in poly] for poly in polys])
    py = np.array([[p[1] for p in poly] for poly in polys])
    x0, y0 = rng.integers(-1, 2, K), rng.integers(-1, 2, K)
    rect = np.stack([x0, y0, x0 + 1, y0 + 1], axis=1)
    got = clip_areas_batch(px, py, rect)
    want = [polygon_area(clip_convex(polys[k], tuple(rect[k]))) for k in range(K)]
    assert np.allclose(got, want, atol=1e-12)


@pytest.mark.parametrize("radius", [0.4, 0.8, 1.5, 3.0])
def test_subareas_tile_each_covered_pixel(radius):
    w = h = 20
    spec = grid_for_radius(w, h, radius)
    sub = hex_subareas(spec, w, h)
    per_pixel = np.zeros((h, w))
    np.add.at(per_pixel, (sub.pix_row, sub.pix_col), sub.area)
    assert per_pixel.max() <= 1.0 + 1e-9
    # Total equals the area of (union of hexagons) within the image.
    cx, cy = hex_sample_points(spec, w, h)
    union = unary_union([shapely.Polygon(hexagon_vertices(x, y, spec.circumradius))
                         for x, y in zip(cx.ravel(), cy.ravel())])
    assert sub.area.sum() == pytest.approx(union.intersection(shapely.box(0, 0, w, h)).area, rel=1e-9)


def test_weighted_mse_zero_for_constant_match():
    img = np.full((10, 12, 1), 77.0)
    hx = s2h(img)
    assert weighted_mse(img, hx) == 0.0
    assert psnr(0.0) == math.inf


def test_weighted_mse_of_constant_offset():
    img = np.full((9, 9, 2), 10.0)
    spec = choose_grid(9, 9)
    hx = HexArray(spec, np.full((spec.rows, spec.cols, 2), 13.0))
    assert weighted_mse(img, hx) == pytest.approx(9.0)
    assert weighted_mse(img, hx, normalize="count") == pytest.approx(
        9.0 * hex_subareas(spec, 9, 9).area.mean())


def test_weighted_mse_errors():
    img = np.zeros((6, 6, 1))
    spec = choose_grid(6, 6)
    with pytest.raises(ValueError):
        weighted_mse(img, HexArray(spec, np.zeros((spec.rows, spec.cols, 3))))
    with pytest.raises(ValueError):
        weighted_mse(img, HexArray(spec, np.zeros((spec.rows, spec.cols, 1))), normalize="max")


def test_psnr_values():
    assert psnr(255.0**2 / 100.0) == pytest.approx(20.0)
    assert psnr(1.0, max_i=1.0) == 0.0
    with pytest.raises(ValueError):
        psnr(-1.0)


def _square_mse_bruteforce(img, k):
    h, w = img.shape[:2]
    kh, kw = k.shape[:2]
    sx, sy = w / kw, h / kh
    num = den = 0.0
    for i in range(h):
        for j in range(w):
            for a in range(kh):
                for b in range(kw):
                    ox = min(j + 1, (b + 1) * sx) - max(j, b * sx)
                    oy = min(i + 1, (a + 1) * sy) - max(i, a * sy)
                    if ox > 0 and oy > 0:
                        num += ox * oy * np.mean((img[i, j] - k[a, b]) ** 2)
                        den += ox * oy
    return num / den


@pytest.mark.parametrize("size", [(3, 4), (5, 5), (7, 2), (9, 9)])
def test_square_weighted_mse_matches_bruteforce(size):
    rng = np.random.default_rng(sum(size))
    img = rng.uniform(0, 255, (7, 9, 2))
    k = resize(img, size[1], size[0])
    assert square_weighted_mse(img, k) == pytest.approx(_square_mse_bruteforce(img, k), rel=1e-10)


def test_square_weighted_mse_identity_is_zero():
    img = np.random.default_rng(0).uniform(0, 255, (6, 6, 1))
    assert square_weighted_mse(img, img) == pytest.approx(0.0, abs=1e-9)


def test_efficiency_report_fields():
    img = np.random.default_rng(1).uniform(0, 255, (24, 24, 1))
    r = efficiency_at(img, grid_for_radius(24, 24, 2.0))
    assert r.delta == pytest.approx(r.T_h - r.T_q)
    assert r.T_h == pytest.approx(psnr(r.mse_h))
    assert not r.skipped


def test_sweep_skips_radius_without_cells(caplog):
    img = np.zeros((8, 8))
    reports = efficiency_sweep(img, [1.0, 50.0])
    assert not reports[0].skipped
    assert reports[1].skipped and math.isnan(reports[1].T_h)
    assert "no hexagon" in caplog.text


def test_sweep_reports_requested_radius():
    img = np.random.default_rng(2).uniform(0, 255, (16, 16))
    assert [r.R for r in efficiency_sweep(img, [0.7, 3.0])] == [0.7, 3.0]


def test_undefined_when_nothing_overlaps():
    from hexlattice.metrics import _weighted_mean

    with pytest.raises(UndefinedMetricError):
        _weighted_mean(np.zeros(0), np.zeros(0), "area")
