"""Hexagonal lattice image processing and hexagonal CNN kernels."""

from .hexgrid import (
    HexArray,
    HexBlock,
    HexCoord,
    HexGridSpec,
    InvalidAddressError,
    SpiralAddress,
    axial_to_linewise,
    axial_to_spiral,
    center_position,
    hex_block,
    linewise_to_axial,
    linewise_to_spiral,
    neighbors,
    spiral_to_axial,
)
from .transform import InterpMode, choose_grid, h2s, s2h
from .metrics import EfficiencyReport, efficiency_sweep, psnr, weighted_mse
from .io import FormatError, read_hexa, write_hexa

__version__ = "0.1.0"
