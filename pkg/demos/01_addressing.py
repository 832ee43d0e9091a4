"""
Addressing a hexagonal grid
===========================

Three ways to name the same cell: linewise (row, col), axial (q, r)
relative to the grid center, and a base-7 spiral address.
"""

from hexlattice.hexgrid import (
    HexCoord,
    HexGridSpec,
    axial_to_linewise,
    axial_to_spiral,
    hex_block,
    linewise_to_axial,
    neighbors,
    spiral_table,
    spiral_to_axial,
)

grid = HexGridSpec(rows=9, cols=9)

# Odd rows are shifted right by half a pitch, so the six neighbours of a cell
# depend on its row parity. They are listed counterclockwise from east.
print("neighbours of (4, 4):", neighbors(4, 4))
print("neighbours of (3, 4):", neighbors(3, 4))

# The axial origin sits at the grid center.
cell = (2, 6)
ax = linewise_to_axial(*cell, grid)
addr = axial_to_spiral(ax)
print(f"{cell} -> axial {ax} -> spiral {''.join(map(str, addr.digits))}")
assert axial_to_linewise(spiral_to_axial(addr), grid) == cell

# A spiral array of order n holds 7**n cells; its first digit picks one of
# seven sub-clusters, each a copy of the order n-1 array.
order2 = spiral_table(2)
print("order-2 spiral, first 14 cells (q, r):", order2[:14].tolist())

# Draw the order-2 cluster on the grid: each cell shows its spiral value.
canvas = [["  ."] * grid.cols for _ in range(grid.rows)]
for value, (q, r) in enumerate(order2):
    rc = axial_to_linewise(HexCoord(int(q), int(r)), grid)
    if rc is not None:
        canvas[rc[0]][rc[1]] = f"{value:3d}"
for i, row in enumerate(canvas):
    print(("  " if i % 2 else "") + " ".join(row))

# Hexagonal blocks of side N hold 3N^2 - 3N + 1 cells.
print("block sizes:", [hex_block(N).M for N in range(1, 7)])
