import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexlattice.hexgrid import (
    AXIAL_DIRECTIONS,
    HexArray,
    HexCoord,
    HexGridSpec,
    InvalidAddressError,
    SpiralAddress,
    axial_to_linewise,
    axial_to_spiral,
    center_position,
    center_positions,
    hex_block,
    hexagon_vertices,
    is_connected,
    linewise_to_axial,
    linewise_to_spiral,
    locate,
    neighbors,
    spiral_table,
    spiral_to_axial,
    spiral_to_linewise,
)


def test_spec_geometry():
    s = HexGridSpec(4, 5, pitch=2.0)
    assert s.circumradius == pytest.approx(2 / math.sqrt(3))
    assert s.row_spacing == pytest.approx(math.sqrt(3))
    assert s.size == 20
    assert HexGridSpec.from_circumradius(4, 5, s.circumradius).pitch == pytest.approx(2.0)


@pytest.mark.parametrize("rows,cols,pitch", [(0, 3, 1.0), (3, -1, 1.0), (2, 2, 0.0), (2, 2, math.nan)])
def test_spec_rejects_bad_geometry(rows, cols, pitch):
    with pytest.raises(ValueError):
        HexGridSpec(rows, cols, pitch)


def test_centers_are_one_pitch_apart():
    s = HexGridSpec(6, 7, pitch=1.3)
    for r in range(s.rows):
        for c in range(s.cols):
            x0, y0 = center_position(r, c, s)
            for nr, nc in neighbors(r, c):
                if s.in_bounds(nr, nc):
                    x1, y1 = center_position(nr, nc, s)
                    assert math.hypot(x1 - x0, y1 - y0) == pytest.approx(s.pitch)


def test_center_positions_vectorised_matches_scalar():
    s = HexGridSpec(5, 4, 0.7)
    cx, cy = center_positions(s)
    for r in range(5):
        for c in range(4):
            assert (cx[r, c], cy[r, c]) == pytest.approx(center_position(r, c, s))


def test_center_position_out_of_bounds():
    with pytest.raises(ValueError):
        center_position(3, 0, HexGridSpec(3, 3))


def test_neighbors_counterclockwise_from_east():
    s = HexGridSpec(5, 5)
    for row in (2, 3):
        x0, y0 = center_position(row, 2, s)
        angles = []
        for r, c in neighbors(row, 2):
            x, y = center_position(r, c, s)
            # Screen y points down; flip it so counterclockwise is positive.
            angles.append(math.degrees(math.atan2(-(y - y0), x - x0)) % 360)
        assert angles == pytest.approx([0, 60, 120, 180, 240, 300])


def test_neighbors_agree_with_axial_directions():
    s = HexGridSpec(9, 9)
    for row in (3, 4):
        base = linewise_to_axial(row, 4, s)
        got = [linewise_to_axial(r, c, s) - base for r, c in neighbors(row, 4)]
        assert got == list(AXIAL_DIRECTIONS)


def test_hex_block_small_cases():
    assert hex_block(1).members == {(1, 1)}
    assert hex_block(2).M == 7
    with pytest.raises(ValueError):
        hex_block(0)


def test_hex_block_is_a_hexagon_of_axial_cells():
    # On the skewed axes the block is the set of cells within distance N-1 of
    # its center (N, N).
    for N in range(1, 7):
        cells = {(x - N, y - N) for x, y in hex_block(N).members}
        ring = {(q, r) for q in range(-N, N + 1) for r in range(-N, N + 1)
                if max(abs(q), abs(r), abs(q - r)) <= N - 1}
        assert cells == ring


def test_order_one_cluster_is_center_plus_directions():
    got = [spiral_to_axial([d]) for d in range(7)]
    assert got == [HexCoord(0, 0)] + list(AXIAL_DIRECTIONS)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_spiral_addresses_are_distinct_and_connected(order):
    table = spiral_table(order)
    cells = {tuple(map(int, t)) for t in table}
    assert len(cells) == 7**order
    assert is_connected(cells)


def test_septree_self_similarity():
    # The 7 sub-clusters of an order-2 array are translates of the order-1 cluster.
    base = {tuple(map(int, t)) for t in spiral_table(1)}
    for top in range(7):
        c = spiral_to_axial([top, 0])
        members = {spiral_to_axial([top, d]) - c for d in range(7)}
        assert {(m.q, m.r) for m in members} == base


def test_spiral_address_validation():
    with pytest.raises(InvalidAddressError):
        SpiralAddress((1, 7))
    with pytest.raises(InvalidAddressError):
        SpiralAddress.from_int(49, 2)
    assert SpiralAddress.from_int(15, 2).digits == (2, 1)
    assert SpiralAddress((2, 1)).value == 15


def test_axial_to_spiral_order_limit():
    far = spiral_to_axial([3, 3, 3])
    assert axial_to_spiral(far).digits == (3, 3, 3)
    assert axial_to_spiral(far, 5).digits == (0, 0, 3, 3, 3)
    with pytest.raises(InvalidAddressError):
        axial_to_spiral(far, 2)


@settings(max_examples=300, deadline=None)
@given(st.integers(-500, 500), st.integers(-500, 500))
def test_axial_spiral_roundtrip(q, r):
    c = HexCoord(q, r)
    assert spiral_to_axial(axial_to_spiral(c)) == c


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.data())
def test_linewise_axial_roundtrip(rows, cols, data):
    s = HexGridSpec(rows, cols)
    r = data.draw(st.integers(0, rows - 1))
    c = data.draw(st.integers(0, cols - 1))
    assert axial_to_linewise(linewise_to_axial(r, c, s), s) == (r, c)
    assert spiral_to_linewise(linewise_to_spiral(r, c, s), s) == (r, c)


def test_axial_origin_is_grid_center_and_outside_is_none():
    s = HexGridSpec(7, 9)
    assert axial_to_linewise(HexCoord(0, 0), s) == (3, 4)
    assert axial_to_linewise(HexCoord(100, 0), s) is None


@pytest.mark.parametrize("rows,cols", [(7, 7), (6, 8), (11, 5)])
def test_axial_neighbours_stay_adjacent_for_any_anchor_parity(rows, cols):
    s = HexGridSpec(rows, cols)
    for r in range(rows):
        for c in range(cols):
            a = linewise_to_axial(r, c, s)
            for d in AXIAL_DIRECTIONS:
                cell = axial_to_linewise(a + d, s)
                if cell is not None:
                    assert cell in neighbors(r, c)


def test_locate_hits_centers_and_near_vertices():
    s = HexGridSpec(6, 6, 1.7)
    cx, cy = center_positions(s)
    r, c = locate(cx, cy, s)
    assert np.array_equal(r, np.arange(6)[:, None].repeat(6, 1))
    assert np.array_equal(c, np.arange(6)[None, :].repeat(6, 0))
    # Points just inside each vertex belong to that hexagon.
    for (vx, vy) in hexagon_vertices(cx[2, 3], cy[2, 3], s.circumradius * 0.999):
        assert tuple(int(v) for v in locate(vx, vy, s)) == (2, 3)


def test_hexarray_linewise_and_slots():
    s = HexGridSpec(3, 4)
    data = np.arange(24.0).reshape(3, 4, 2)
    a = HexArray(s, data)
    assert a.linewise()[a.slot(2, 1, 1)] == data[2, 1, 1]
    assert a.unslot(a.slot(2, 1, 1)) == (2, 1, 1)
    b = HexArray.from_linewise(s, 2, a.linewise())
    assert np.array_equal(b.data, data)
    with pytest.raises(ValueError):
        HexArray(s, np.zeros((4, 3, 1)))


def test_hexagon_area_from_vertices():
    from hexlattice.metrics import polygon_area

    v = hexagon_vertices(0.0, 0.0, 2.0)
    assert polygon_area(v) == pytest.approx(1.5 * math.sqrt(3) * 4)
