"""Hexagonal addressing and geometry.

Grids are pseudohexagonal: stored as ``rows x cols`` arrays in linewise
(row-major) order, pointy-top hexagons, every odd row shifted right by half a
pitch. On top of that sits a spiral (base-7) addressing scheme whose clusters
are placed relative to the grid center.

Axial coordinates ``(q, r)`` follow the usual convention for odd-row offset
layouts: ``r`` is the row, and moving one step along ``q`` moves one pitch
to the right. Rows grow downwards, as in image space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

SQRT3 = math.sqrt(3.0)


class InvalidAddressError(ValueError):
    """A spiral address digit is outside 0..6."""


@dataclass(frozen=True)
class HexCoord:
    q: int
    r: int

    @property
    def cube(self) -> tuple[int, int, int]:
        x, z = self.q, self.r
        return x, -x - z, z

    def __add__(self, other: "HexCoord") -> "HexCoord":
        return HexCoord(self.q + other.q, self.r + other.r)

    def __sub__(self, other: "HexCoord") -> "HexCoord":
        return HexCoord(self.q - other.q, self.r - other.r)


# Unit neighbours counterclockwise (as seen on screen) starting due east:
# E, NE, NW, W, SW, SE. Index k here is spiral digit k + 1.
AXIAL_DIRECTIONS = (
    HexCoord(1, 0),
    HexCoord(1, -1),
    HexCoord(0, -1),
    HexCoord(-1, 0),
    HexCoord(-1, 1),
    HexCoord(0, 1),
)

# Neighbour offsets (drow, dcol) in the same E, NE, NW, W, SW, SE order.
EVEN_ROW_OFFSETS = ((0, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0))
ODD_ROW_OFFSETS = ((0, 1), (-1, 1), (-1, 0), (0, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class HexGridSpec:
    """Geometry of a pseudohexagonal grid.

    ``pitch`` is the horizontal distance between neighbouring centers; rows
    are ``pitch * sqrt(3) / 2`` apart. Odd rows are the shifted ones.
    """

    rows: int
    cols: int
    pitch: float = 1.0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid must have rows, cols >= 1, got {self.rows}x{self.cols}")
        if not self.pitch > 0:
            raise ValueError(f"pitch must be positive, got {self.pitch}")

    @property
    def circumradius(self) -> float:
        return self.pitch / SQRT3

    @property
    def row_spacing(self) -> float:
        return self.pitch * SQRT3 / 2.0

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @property
    def shift_parity(self) -> int:
        return 1

    @classmethod
    def from_circumradius(cls, rows: int, cols: int, radius: float) -> "HexGridSpec":
        return cls(rows, cols, radius * SQRT3)

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.rows and 0 <= col < self.cols

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) of the union of cells, in grid coordinates."""
        R = self.circumradius
        half = self.pitch / 2.0
        xmax = (self.cols - 1) * self.pitch + half
        if self.rows > 1:
            xmax += half
        ymax = (self.rows - 1) * self.row_spacing + R
        return -half, -R, xmax, ymax


@dataclass
class HexArray:
    """Multi-channel samples on a pseudohexagonal grid.

    ``data`` has shape ``(rows, cols, channels)``; its C-order flattening is
    the linewise storage.
    """

    spec: HexGridSpec
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim == 2:
            data = data[:, :, None]
        if data.shape[:2] != (self.spec.rows, self.spec.cols) or data.ndim != 3:
            raise ValueError(
                f"data shape {data.shape} does not match grid {self.spec.rows}x{self.spec.cols}"
            )
        if data.shape[2] < 1:
            raise ValueError("HexArray needs at least one channel")
        self.data = data

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @classmethod
    def zeros(cls, spec: HexGridSpec, channels: int = 1) -> "HexArray":
        return cls(spec, np.zeros((spec.rows, spec.cols, channels)))

    def linewise(self) -> np.ndarray:
        return self.data.reshape(-1)

    @classmethod
    def from_linewise(cls, spec: HexGridSpec, channels: int, flat) -> "HexArray":
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != spec.rows * spec.cols * channels:
            raise ValueError(
                f"expected {spec.rows * spec.cols * channels} samples, got {flat.size}"
            )
        return cls(spec, flat.reshape(spec.rows, spec.cols, channels))

    def slot(self, row: int, col: int, channel: int = 0) -> int:
        if not (self.spec.in_bounds(row, col) and 0 <= channel < self.channels):
            raise IndexError((row, col, channel))
        return (row * self.spec.cols + col) * self.channels + channel

    def unslot(self, index: int) -> tuple[int, int, int]:
        if not 0 <= index < self.data.size:
            raise IndexError(index)
        cell, channel = divmod(index, self.channels)
        row, col = divmod(cell, self.spec.cols)
        return row, col, channel


# --- hexagonal blocks -----------------------------------------------------


@dataclass(frozen=True)
class HexBlock:
    N: int
    members: frozenset

    @property
    def M(self) -> int:
        return len(self.members)


def block_size(N: int) -> int:
    """Number of cells in a hexagonal block of side length ``N``."""
    return 3 * N * N - 3 * N + 1


def hex_block(N: int) -> HexBlock:
    """Hexagonal block of side ``N`` on skewed (x, y) axes.

    The members are the integer points with ``0 < x, y < 2N`` and
    ``|x - y| < N``. Note the bound is ``2N - 1`` inclusive.
    """
    if N < 1:
        raise ValueError(f"block side length must be >= 1, got {N}")
    lo, hi = 0, 2 * N
    members = frozenset(
        (x, y)
        for x in range(lo + 1, hi)
        for y in range(lo + 1, hi)
        if abs(x - y) < N
    )
    return HexBlock(N, members)


# --- spiral addressing ----------------------------------------------------


@dataclass(frozen=True)
class SpiralAddress:
    digits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        for d in self.digits:
            if not 0 <= d < 7:
                raise InvalidAddressError(f"spiral digit {d} not in 0..6")

    @property
    def order(self) -> int:
        return len(self.digits)

    @property
    def value(self) -> int:
        v = 0
        for d in self.digits:
            v = 7 * v + d
        return v

    @classmethod
    def from_int(cls, value: int, order: int) -> "SpiralAddress":
        if not 0 <= value < 7**order:
            raise InvalidAddressError(f"{value} is not an order-{order} address")
        digits = []
        for _ in range(order):
            value, d = divmod(value, 7)
            digits.append(d)
        return cls(tuple(reversed(digits)))


def _digit_offset(d: int) -> tuple[int, int]:
    if d == 0:
        return 0, 0
    u = AXIAL_DIRECTIONS[d - 1]
    return u.q, u.r


def scale_axial(q: int, r: int) -> tuple[int, int]:
    """One application of the index-7 sublattice map (q, r) -> (2q - r, q + 3r)."""
    return 2 * q - r, q + 3 * r


def spiral_to_axial(addr) -> HexCoord:
    """Axial offset of a spiral address relative to the cluster center.

    Digits are most significant first. Accepts a :class:`SpiralAddress` or a
    plain digit sequence.
    """
    if not isinstance(addr, SpiralAddress):
        addr = SpiralAddress(tuple(addr))
    # Horner: offset = T(offset) + D(digit), left to right.
    q = r = 0
    for d in addr.digits:
        q, r = scale_axial(q, r)
        dq, dr = _digit_offset(d)
        q, r = q + dq, r + dr
    return HexCoord(q, r)


_DIGIT_OF_RESIDUE = {}
for _d in range(7):
    _dq, _dr = _digit_offset(_d)
    # (q, r) lies in the image of scale_axial iff 3q + r = 0 mod 7.
    _DIGIT_OF_RESIDUE[(3 * _dq + _dr) % 7] = _d
del _d, _dq, _dr


def axial_to_spiral(c: HexCoord, order: int | None = None) -> SpiralAddress:
    """Spiral address of an axial offset; inverse of :func:`spiral_to_axial`.

    Every lattice cell has exactly one finite address. With ``order`` the
    result is left-padded with zeros to that many digits, and an
    :class:`InvalidAddressError` is raised if it needs more.
    """
    q, r = c.q, c.r
    digits = []
    for _ in range(64):
        if q == 0 and r == 0:
            break
        d = _DIGIT_OF_RESIDUE[(3 * q + r) % 7]
        dq, dr = _digit_offset(d)
        q, r = q - dq, r - dr
        # Inverse of scale_axial: (3q + r, -q + 2r) / 7, exact here.
        q, r = (3 * q + r) // 7, (2 * r - q) // 7
        digits.append(d)
    else:  # pragma: no cover - the digit set represents every cell
        raise InvalidAddressError(f"no spiral address found for {c}")
    digits.reverse()
    if order is not None:
        if len(digits) > order:
            raise InvalidAddressError(f"{c} needs {len(digits)} digits, more than order {order}")
        digits = [0] * (order - len(digits)) + digits
    return SpiralAddress(tuple(digits))


def linewise_to_spiral(row: int, col: int, spec: HexGridSpec, order: int | None = None) -> SpiralAddress:
    return axial_to_spiral(linewise_to_axial(row, col, spec), order)


def spiral_addresses(order: int) -> Iterator[SpiralAddress]:
    for v in range(7**order):
        yield SpiralAddress.from_int(v, order)


@lru_cache(maxsize=None)
def spiral_table(order: int) -> np.ndarray:
    """Axial (q, r) of every order-``order`` address, indexed by address value."""
    out = np.empty((7**order, 2), dtype=np.int64)
    for v, addr in enumerate(spiral_addresses(order)):
        c = spiral_to_axial(addr)
        out[v] = c.q, c.r
    out.setflags(write=False)
    return out


# --- linewise <-> axial ---------------------------------------------------


def grid_anchor(spec: HexGridSpec) -> tuple[int, int]:
    """Linewise cell that axial (0, 0) maps to: the grid center, rounded down."""
    return spec.rows // 2, spec.cols // 2


def offset_to_axial(row: int, col: int) -> HexCoord:
    """Absolute axial coordinate of a linewise cell (row 0 unshifted)."""
    return HexCoord(col - (row >> 1), row)


def axial_to_offset(c: HexCoord) -> tuple[int, int]:
    return c.r, c.q + (c.r >> 1)


def axial_to_linewise(c: HexCoord, spec: HexGridSpec) -> Optional[tuple[int, int]]:
    """Map an axial coordinate (relative to the grid anchor) to (row, col).

    Returns ``None`` when the cell falls outside the grid. The translation is
    done in axial space so that adjacency survives even when the anchor row
    is odd.
    """
    ar, ac = grid_anchor(spec)
    a = offset_to_axial(ar, ac)
    row, col = axial_to_offset(c + a)
    if not spec.in_bounds(row, col):
        return None
    return row, col


def linewise_to_axial(row: int, col: int, spec: HexGridSpec) -> HexCoord:
    ar, ac = grid_anchor(spec)
    return offset_to_axial(row, col) - offset_to_axial(ar, ac)


def spiral_to_linewise(addr, spec: HexGridSpec) -> Optional[tuple[int, int]]:
    return axial_to_linewise(spiral_to_axial(addr), spec)


# --- neighbourhoods and geometry ------------------------------------------


def neighbor_offsets(row_parity: int) -> tuple[tuple[int, int], ...]:
    return ODD_ROW_OFFSETS if row_parity & 1 else EVEN_ROW_OFFSETS


def neighbors(row: int, col: int, spec: Optional[HexGridSpec] = None) -> list[tuple[int, int]]:
    """The six neighbours of a cell, counterclockwise from east.

    Out-of-bounds neighbours are returned as-is; ``spec`` is accepted for
    symmetry with the other helpers but not needed.
    """
    return [(row + dr, col + dc) for dr, dc in neighbor_offsets(row)]


def center_position(row: int, col: int, spec: HexGridSpec) -> tuple[float, float]:
    if not spec.in_bounds(row, col):
        raise ValueError(f"cell ({row}, {col}) outside {spec.rows}x{spec.cols} grid")
    cx = (col + 0.5 * (row & 1)) * spec.pitch
    cy = row * spec.row_spacing
    return cx, cy


def center_positions(spec: HexGridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised centers: two ``(rows, cols)`` arrays (x, y)."""
    rows = np.arange(spec.rows)
    cols = np.arange(spec.cols)
    cx = (cols[None, :] + 0.5 * (rows[:, None] & 1)) * spec.pitch
    cy = np.broadcast_to(rows[:, None] * spec.row_spacing, cx.shape)
    return cx, np.array(cy)


def hexagon_vertices(cx: float, cy: float, radius: float) -> list[tuple[float, float]]:
    """Pointy-top hexagon, vertices at 30 + 60k degrees (positive shoelace order)."""
    return [
        (cx + radius * math.cos(math.radians(30 + 60 * k)),
         cy + radius * math.sin(math.radians(30 + 60 * k)))
        for k in range(6)
    ]


def locate(x, y, spec: HexGridSpec):
    """Cell (row, col) whose hexagon contains the point(s), ignoring bounds.

    Works on scalars or arrays via cube rounding of the fractional axial
    coordinate.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    fr = y / spec.row_spacing
    fq = x / spec.pitch - fr / 2.0
    fx, fz = fq, fr
    fy = -fx - fz
    rx, ry, rz = np.rint(fx), np.rint(fy), np.rint(fz)
    dx, dy, dz = np.abs(rx - fx), np.abs(ry - fy), np.abs(rz - fz)
    fix_x = (dx > dy) & (dx > dz)
    fix_z = ~fix_x & (dz >= dy)
    rx = np.where(fix_x, -ry - rz, rx)
    rz = np.where(fix_z, -rx - ry, rz)
    r = rz.astype(np.int64)
    q = rx.astype(np.int64)
    return r, q + (r >> 1)


def is_connected(cells: Sequence[tuple[int, int]]) -> bool:
    """Whether a set of axial cells forms one edge-connected region."""
    cells = set(cells)
    if not cells:
        return True
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        q, r = stack.pop()
        for u in AXIAL_DIRECTIONS:
            n = (q + u.q, r + u.r)
            if n in cells and n not in seen:
                seen.add(n)
                stack.append(n)
    return len(seen) == len(cells)
