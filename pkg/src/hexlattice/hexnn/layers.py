"""Forward/backward kernels for hexagonal and square CNN layers.

Activations are ``(batch, rows, cols, channels)`` float arrays. Hexagonal
layers treat the spatial axes as a pseudohexagonal grid with odd rows
shifted right, as in :mod:`hexlattice.hexgrid`.

Backpropagation is written out by hand for every layer; each ``*_backward``
returns the gradient of ``sum(grad_out * forward(...))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..hexgrid import EVEN_ROW_OFFSETS, ODD_ROW_OFFSETS
from .assignment import pool_offsets

# Seven hexagonal taps per row parity: center first, then E, NE, NW, W, SW, SE.
HEX_TAPS = {
    0: ((0, 0),) + EVEN_ROW_OFFSETS,
    1: ((0, 0),) + ODD_ROW_OFFSETS,
}


def _check4(x, name="x"):
    if x.ndim != 4:
        raise ValueError(f"{name} must be 4-D (batch, rows, cols, channels), got {x.shape}")


# --- strided tap gathering ---------------------------------------------------------


@dataclass(frozen=True)
class _Group:
    """Output cells sharing one tap layout.

    Output rows ``out_rows`` (a range) sit on input rows ``row0 + k * row_step``
    and their columns on ``col0 + j * col_step``.
    """

    out_rows: range
    row0: int
    row_step: int
    col0: int
    col_step: int
    taps: tuple


def _gather(xp, pad, g: _Group, n_cols):
    """Stack the tap values of one group: ``(B, len(rows), n_cols, taps, C)``."""
    n_rows = len(g.out_rows)
    out = []
    for dr, dc in g.taps:
        r0 = pad[0] + g.row0 + dr
        c0 = pad[1] + g.col0 + dc
        out.append(xp[:, r0 : r0 + g.row_step * (n_rows - 1) + 1 : g.row_step,
                      c0 : c0 + g.col_step * (n_cols - 1) + 1 : g.col_step])
    return np.stack(out, axis=3)


def _scatter(gp, pad, g: _Group, n_cols, vals):
    """Adjoint of :func:`_gather`: accumulate ``vals`` into padded gradient ``gp``."""
    n_rows = len(g.out_rows)
    for t, (dr, dc) in enumerate(g.taps):
        r0 = pad[0] + g.row0 + dr
        c0 = pad[1] + g.col0 + dc
        gp[:, r0 : r0 + g.row_step * (n_rows - 1) + 1 : g.row_step,
           c0 : c0 + g.col_step * (n_cols - 1) + 1 : g.col_step] += vals[:, :, :, t]


def _padding(groups, n_cols, rows, cols):
    """(top, left, bottom, right) padding so every tap slice is in range."""
    top = left = bottom = right = 0
    for g in groups:
        if not len(g.out_rows):
            continue
        last_r = g.row0 + g.row_step * (len(g.out_rows) - 1)
        last_c = g.col0 + g.col_step * (n_cols - 1)
        for dr, dc in g.taps:
            top = max(top, -(g.row0 + dr))
            left = max(left, -(g.col0 + dc))
            bottom = max(bottom, last_r + dr - (rows - 1))
            right = max(right, last_c + dc - (cols - 1))
    return top, left, bottom, right


def _pad(x, p, value=0.0):
    top, left, bottom, right = p
    if not any(p):
        return x
    return np.pad(x, ((0, 0), (top, bottom), (left, right), (0, 0)), constant_values=value)


def _unpad(gp, p, rows, cols):
    return gp[:, p[0] : p[0] + rows, p[1] : p[1] + cols]


# --- hexagonal convolution ----------------------------------------------------------


def _mask(parity):
    m = np.zeros((3, 3), dtype=bool)
    for dr, dc in HEX_TAPS[parity]:
        m[1 + dr, 1 + dc] = True
    return m


MASK_EVEN = _mask(0)
MASK_ODD = _mask(1)


@dataclass
class HexKernelPair:
    """Even-row and odd-row hexagonal kernels sharing one set of 7 taps.

    ``taps[t]`` is the ``(C_in, C_out)`` weight of tap ``t`` in
    :data:`HEX_TAPS` order. Both 3x3 kernels are views of the same taps laid
    out under the two row-parity masks, so masked-off entries are zero by
    construction.
    """

    taps: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        self.taps = np.asarray(self.taps, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.taps.ndim != 3 or self.taps.shape[0] != 7:
            raise ValueError(f"taps must be (7, C_in, C_out), got {self.taps.shape}")
        if self.bias.shape != (self.taps.shape[2],):
            raise ValueError("bias length must equal C_out")

    @property
    def c_in(self):
        return self.taps.shape[1]

    @property
    def c_out(self):
        return self.taps.shape[2]

    mask_even = MASK_EVEN
    mask_odd = MASK_ODD

    def dense_kernel(self, parity: int) -> np.ndarray:
        """The parity's kernel as a dense ``(3, 3, C_in, C_out)`` array."""
        w = np.zeros((3, 3) + self.taps.shape[1:])
        for t, (dr, dc) in enumerate(HEX_TAPS[parity & 1]):
            w[1 + dr, 1 + dc] = self.taps[t]
        return w

    @property
    def even_weights(self):
        return self.dense_kernel(0)

    @property
    def odd_weights(self):
        return self.dense_kernel(1)

    @classmethod
    def from_dense(cls, even, odd, bias) -> "HexKernelPair":
        """Build from two dense kernels; they must agree on the shared taps."""
        even, odd = np.asarray(even, float), np.asarray(odd, float)
        taps_e = np.stack([even[1 + dr, 1 + dc] for dr, dc in HEX_TAPS[0]])
        taps_o = np.stack([odd[1 + dr, 1 + dc] for dr, dc in HEX_TAPS[1]])
        if np.any(even[~MASK_EVEN]) or np.any(odd[~MASK_ODD]):
            raise ValueError("weights present at masked-off taps")
        if not np.array_equal(taps_e, taps_o):
            raise ValueError("even and odd kernels disagree on shared taps")
        return cls(taps_e, bias)


def hconv_output_shape(rows: int, cols: int, stride: int) -> tuple[int, int]:
    if stride == 1:
        return rows, cols
    if stride == 2:
        return rows // 2 + 1, cols // 2
    raise ValueError(f"hexagonal convolution supports stride 1 or 2, got {stride}")


def _hconv_groups(rows_out, stride):
    # Output (i, j) is centered on input (s*i, s*j + (s//2)*(i%2)): the output
    # grid is again a hex grid whose odd rows sit half an output pitch right.
    groups = []
    for p in (0, 1):
        in_parity = (stride * p) & 1
        groups.append(_Group(range(p, rows_out, 2), stride * p, 2 * stride,
                             (stride // 2) * p, stride, HEX_TAPS[in_parity]))
    return groups


def hconv2d_forward(x, k: HexKernelPair, stride: int = 1) -> np.ndarray:
    """Hexagonal convolution with 7-tap kernels and zero padding.

    Stride 1 keeps the grid shape; stride 2 gives ``(rows//2 + 1, cols//2)``,
    e.g. (34, 30) -> (18, 15).
    """
    x = np.asarray(x, dtype=np.float64)
    _check4(x)
    if x.shape[3] != k.c_in:
        raise ValueError(f"input has {x.shape[3]} channels, kernel expects {k.c_in}")
    B, H, W, C = x.shape
    Ho, Wo = hconv_output_shape(H, W, stride)
    groups = _hconv_groups(Ho, stride)
    pad = _padding(groups, Wo, H, W)
    xp = _pad(x, pad)
    y = np.empty((B, Ho, Wo, k.c_out))
    wmat = k.taps.reshape(7 * C, k.c_out)
    for g in groups:
        if not len(g.out_rows):
            continue
        cols = _gather(xp, pad, g, Wo)
        y[:, g.out_rows.start :: 2] = cols.reshape(*cols.shape[:3], 7 * C) @ wmat + k.bias
    return y


def hconv2d_backward(x, k: HexKernelPair, stride, grad_out):
    """Gradients ``(grad_x, grad_taps, grad_bias)`` of the hexagonal convolution."""
    x = np.asarray(x, dtype=np.float64)
    _check4(x)
    B, H, W, C = x.shape
    Ho, Wo = hconv_output_shape(H, W, stride)
    grad_out = np.asarray(grad_out, dtype=np.float64)
    if grad_out.shape != (B, Ho, Wo, k.c_out):
        raise ValueError(f"grad_out shape {grad_out.shape} != output shape {(B, Ho, Wo, k.c_out)}")
    groups = _hconv_groups(Ho, stride)
    pad = _padding(groups, Wo, H, W)
    xp = _pad(x, pad)
    gp = np.zeros(xp.shape)
    g_taps = np.zeros((7 * C, k.c_out))
    wmat = k.taps.reshape(7 * C, k.c_out)
    for g in groups:
        if not len(g.out_rows):
            continue
        go = grad_out[:, g.out_rows.start :: 2].reshape(-1, k.c_out)
        cols = _gather(xp, pad, g, Wo)
        g_taps += cols.reshape(-1, 7 * C).T @ go
        gcols = (go @ wmat.T).reshape(cols.shape)
        _scatter(gp, pad, g, Wo, gcols)
    grad_bias = grad_out.sum(axis=(0, 1, 2))
    return _unpad(gp, pad, H, W), g_taps.reshape(k.taps.shape), grad_bias


# --- hexagonal max pooling -----------------------------------------------------------


def hmaxpool_output_shape(rows: int, cols: int) -> tuple[int, int]:
    if rows < 3 or cols < 3:
        raise ValueError(f"hexagonal pooling needs at least 3x3 input, got {rows}x{cols}")
    return math.ceil((rows - 2) / 2), math.ceil(cols / 3)


def _hpool_groups(rows_out):
    # Window (i, j) is centered on input (2i + 1, 3j + 1 + i%2); all centers
    # lie on odd rows.
    taps = pool_offsets(1)
    return [_Group(range(p, rows_out, 2), 1 + 2 * p, 4, 1 + p, 3, taps) for p in (0, 1)]


def hmaxpool_forward(x):
    """Max over 7-cell hexagonal windows; returns ``(y, argmax)``.

    ``argmax`` holds the winning tap index (into :func:`pool_offsets`) per
    output value. Cells outside the input count as zeros.
    """
    x = np.asarray(x, dtype=np.float64)
    _check4(x)
    B, H, W, C = x.shape
    Ho, Wo = hmaxpool_output_shape(H, W)
    groups = _hpool_groups(Ho)
    pad = _padding(groups, Wo, H, W)
    xp = _pad(x, pad)
    y = np.empty((B, Ho, Wo, C))
    arg = np.empty((B, Ho, Wo, C), dtype=np.int64)
    for g in groups:
        if not len(g.out_rows):
            continue
        cols = _gather(xp, pad, g, Wo)
        a = np.argmax(cols, axis=3)
        arg[:, g.out_rows.start :: 2] = a
        y[:, g.out_rows.start :: 2] = np.take_along_axis(cols, a[:, :, :, None], axis=3)[:, :, :, 0]
    return y, arg


def hmaxpool_backward(x, argmax, grad_out):
    x = np.asarray(x, dtype=np.float64)
    _check4(x)
    B, H, W, C = x.shape
    Ho, Wo = hmaxpool_output_shape(H, W)
    if argmax.shape != (B, Ho, Wo, C) or grad_out.shape != (B, Ho, Wo, C):
        raise ValueError("argmax / grad_out do not match this input's pooled shape")
    groups = _hpool_groups(Ho)
    pad = _padding(groups, Wo, H, W)
    gp = np.zeros((B, H + pad[0] + pad[2], W + pad[1] + pad[3], C))
    for g in groups:
        if not len(g.out_rows):
            continue
        a = argmax[:, g.out_rows.start :: 2]
        go = grad_out[:, g.out_rows.start :: 2]
        vals = (a[:, :, :, None, :] == np.arange(7)[None, None, None, :, None]) * go[:, :, :, None, :]
        _scatter(gp, pad, g, Wo, vals)
    return _unpad(gp, pad, H, W)


# --- square convolution and pooling --------------------------------------------------


def same_padding(n: int, k: int, s: int) -> tuple[int, int, int]:
    """Output size and (before, after) padding for 'same' convolution."""
    out = math.ceil(n / s)
    total = max((out - 1) * s + k - n, 0)
    return out, total // 2, total - total // 2


def _square_setup(H, W, k, s):
    Ho, pt, pb = same_padding(H, k, s)
    Wo, pl, pr = same_padding(W, k, s)
    taps = tuple((dr, dc) for dr in range(k) for dc in range(k))
    g = _Group(range(Ho), 0, s, 0, s, taps)
    return Ho, Wo, (pt, pl, pb, pr), g


def _square_slices(xp, g, Ho, Wo):
    return _gather(xp, (0, 0), _Group(range(Ho), 0, g.row_step, 0, g.col_step, g.taps), Wo)


def sconv2d_forward(x, w, b, stride: int = 1) -> np.ndarray:
    """'Same'-padded square convolution; ``w`` is ``(k, k, C_in, C_out)``."""
    x = np.asarray(x, dtype=np.float64)
    _check4(x)
    k = w.shape[0]
    if w.shape[2] != x.shape[3]:
        raise ValueError(f"input has {x.shape[3]} channels, kernel expects {w.shape[2]}")
    B, H, W, C = x.shape
    Ho, Wo, pad, g = _square_setup(H, W, k, stride)
    xp = _pad(x, pad)
    cols = _square_slices(xp, g, Ho, Wo)
    return cols.reshape(B, Ho, Wo, k * k * C) @ w.reshape(k * k * C, -1) + b


def sconv2d_backward(x, w, b, stride, grad_out):
    x = np.asarray(x, dtype=np.float64)
    _check4(x)
    k = w.shape[0]
    B, H, W, C = x.shape
    Ho, Wo, pad, g = _square_setup(H, W, k, stride)
    if grad_out.shape != (B, Ho, Wo, w.shape[3]):
        raise ValueError(f"grad_out shape {grad_out.shape} != output shape {(B, Ho, Wo, w.shape[3])}")
    xp = _pad(x, pad)
    cols = _square_slices(xp, g, Ho, Wo)
    go = grad_out.reshape(-1, w.shape[3])
    wmat = w.reshape(k * k * C, -1)
    gw = (cols.reshape(-1, k * k * C).T @ go).reshape(w.shape)
    gcols = (go @ wmat.T).reshape(cols.shape)
    gp = np.zeros(xp.shape)
    _scatter(gp, (0, 0), _Group(range(Ho), 0, stride, 0, stride, g.taps), Wo, gcols)
    return _unpad(gp, pad, H, W), gw, grad_out.sum(axis=(0, 1, 2))


def smaxpool_forward(x, size: int = 2, stride: int | None = None):
    """'Same'-padded square max pooling (padding never wins); returns ``(y, argmax)``."""
    x = np.asarray(x, dtype=np.float64)
    _check4(x)
    stride = stride or size
    B, H, W, C = x.shape
    Ho, Wo, pad, g = _square_setup(H, W, size, stride)
    xp = _pad(x, pad, value=-np.inf)
    cols = _square_slices(xp, g, Ho, Wo)
    a = np.argmax(cols, axis=3)
    y = np.take_along_axis(cols, a[:, :, :, None], axis=3)[:, :, :, 0]
    return y, a


def smaxpool_backward(x, argmax, grad_out, size: int = 2, stride: int | None = None):
    stride = stride or size
    B, H, W, C = x.shape
    Ho, Wo, pad, g = _square_setup(H, W, size, stride)
    if argmax.shape != (B, Ho, Wo, C) or grad_out.shape != (B, Ho, Wo, C):
        raise ValueError("argmax / grad_out do not match this input's pooled shape")
    gp = np.zeros((B, H + pad[0] + pad[2], W + pad[1] + pad[3], C))
    T = size * size
    vals = (argmax[:, :, :, None, :] == np.arange(T)[None, None, None, :, None]) * grad_out[:, :, :, None, :]
    _scatter(gp, (0, 0), _Group(range(Ho), 0, stride, 0, stride, g.taps), Wo, vals)
    return _unpad(gp, pad, H, W)


def smaxpool_output_shape(rows, cols, size, stride=None):
    stride = stride or size
    return math.ceil(rows / stride), math.ceil(cols / stride)


# --- dense, activations, dropout, loss ------------------------------------------------


def dense_forward(x, w, b):
    return x @ w + b


def dense_backward(x, w, grad_out):
    return grad_out @ w.T, x.T @ grad_out, grad_out.sum(axis=0)


def relu_forward(x):
    return np.maximum(x, 0.0)


def relu_backward(x, grad_out):
    return grad_out * (x > 0)


def flatten_forward(x):
    return x.reshape(x.shape[0], -1)


def flatten_backward(x_shape, grad_out):
    return grad_out.reshape(x_shape)


def dropout_mask(shape, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Inverted-dropout mask: zeros with probability ``rate``, else ``1/(1-rate)``."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if rate == 0.0:
        return np.ones(shape)
    return (rng.random(shape) >= rate) / (1.0 - rate)


def dropout_forward(x, rate, rng=None, training=True):
    if not training or rate == 0.0:
        return x, None
    mask = dropout_mask(x.shape, rate, rng)
    return x * mask, mask


def dropout_backward(mask, grad_out):
    return grad_out if mask is None else grad_out * mask


def softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def softmax_xent(logits, labels):
    """Mean softmax cross-entropy and its gradient w.r.t. the logits."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n = logits.shape[0]
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    loss = -logp[np.arange(n), labels].mean()
    grad = np.exp(logp)
    grad[np.arange(n), labels] -= 1.0
    return float(loss), grad / n
