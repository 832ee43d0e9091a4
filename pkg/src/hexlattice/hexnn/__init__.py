"""Hexagonal and square CNN kernels with a small numpy trainer."""

from .assignment import assignment_solve, pool_offsets, pooling_assignment
from .layers import (
    HexKernelPair,
    hconv2d_backward,
    hconv2d_forward,
    hmaxpool_backward,
    hmaxpool_forward,
    sconv2d_backward,
    sconv2d_forward,
    smaxpool_backward,
    smaxpool_forward,
    softmax_xent,
)
from .model import LayerSpec, Model, ModelSpec, ShapeError, count_params, h_cnn, preset, s_cnn, summary
from .optim import AdamConfig, AdamState, adam_step, glorot_init
