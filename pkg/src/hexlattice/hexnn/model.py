"""Layer-sequence models: presets, shape chains, parameter counts, forward/backward."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import layers as L
from .optim import glorot_init


class ShapeError(ValueError):
    """A layer cannot consume the shape produced by its predecessor."""

    def __init__(self, layer: str, message: str):
        super().__init__(f"layer {layer!r}: {message}")
        self.layer = layer


KINDS = {"hconv", "sconv", "hmaxpool", "smaxpool", "dropout", "flatten", "dense"}


@dataclass(frozen=True)
class LayerSpec:
    name: str
    kind: str
    filters: int = 0        # conv output channels
    units: int = 0          # dense output size
    size: int = 0           # square kernel / pool size
    stride: int = 1
    rate: float = 0.0       # dropout rate
    activation: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}")

    @property
    def type_name(self) -> str:
        return {
            "hconv": "HConv2D", "sconv": "SConv2D", "hmaxpool": "HMaxPool2D",
            "smaxpool": "SMaxPool2D", "dropout": "Dropout", "flatten": "Flatten",
            "dense": "Dense",
        }[self.kind]

    @property
    def size_label(self) -> str:
        if self.kind in ("hconv", "hmaxpool"):
            return "7^1"
        if self.kind in ("sconv", "smaxpool"):
            return f"{self.size}x{self.size}"
        if self.kind == "dropout":
            return f"{self.rate:g}"
        if self.kind == "dense":
            return str(self.units)
        return "/"


@dataclass(frozen=True)
class ModelSpec:
    name: str
    input_shape: tuple          # (rows, cols, channels)
    layers: tuple

    def shapes(self) -> list[tuple]:
        """Output shape of every layer (without the batch axis)."""
        out = []
        shape = tuple(self.input_shape)
        for layer in self.layers:
            shape = _output_shape(layer, shape)
            out.append(shape)
        return out


def _output_shape(layer: LayerSpec, shape: tuple) -> tuple:
    k = layer.kind
    spatial = len(shape) == 3
    if k in ("hconv", "sconv", "hmaxpool", "smaxpool") and not spatial:
        raise ShapeError(layer.name, f"needs a (rows, cols, channels) input, got {shape}")
    try:
        if k == "hconv":
            return L.hconv_output_shape(shape[0], shape[1], layer.stride) + (layer.filters,)
        if k == "sconv":
            return (L.same_padding(shape[0], layer.size, layer.stride)[0],
                    L.same_padding(shape[1], layer.size, layer.stride)[0], layer.filters)
        if k == "hmaxpool":
            return L.hmaxpool_output_shape(shape[0], shape[1]) + (shape[2],)
        if k == "smaxpool":
            return L.smaxpool_output_shape(shape[0], shape[1], layer.size, layer.stride) + (shape[2],)
    except ValueError as e:
        raise ShapeError(layer.name, str(e)) from None
    if k == "dropout":
        return shape
    if k == "flatten":
        return (int(np.prod(shape)),)
    if k == "dense":
        if spatial:
            raise ShapeError(layer.name, f"dense needs a flat input, got {shape}")
        return (layer.units,)
    raise AssertionError(k)


def _layer_params(layer: LayerSpec, in_shape: tuple) -> int:
    if layer.kind == "hconv":
        return 7 * in_shape[2] * layer.filters + layer.filters
    if layer.kind == "sconv":
        return layer.size * layer.size * in_shape[2] * layer.filters + layer.filters
    if layer.kind == "dense":
        return in_shape[0] * layer.units + layer.units
    return 0


def count_params(model: ModelSpec) -> tuple[list[tuple[str, int]], int]:
    """Trainable parameters per layer and in total.

    Hexagonal convolutions count 7 taps per input/output channel pair.
    """
    per_layer = []
    shape = tuple(model.input_shape)
    for layer in model.layers:
        per_layer.append((layer.name, _layer_params(layer, shape)))
        shape = _output_shape(layer, shape)
    return per_layer, sum(n for _, n in per_layer)


# --- presets -----------------------------------------------------------------------


def s_cnn(input_shape=(32, 32, 3), classes: int = 100, pool: int = 2) -> ModelSpec:
    layers = (
        LayerSpec("conv1", "sconv", filters=32, size=3, activation="relu"),
        LayerSpec("conv2", "sconv", filters=32, size=3, stride=2, activation="relu"),
        LayerSpec("dropout1", "dropout", rate=0.25),
        LayerSpec("conv3", "sconv", filters=64, size=3, activation="relu"),
        LayerSpec("pool", "smaxpool", size=pool, stride=pool),
        LayerSpec("dropout2", "dropout", rate=0.25),
        LayerSpec("flatten", "flatten"),
        LayerSpec("dense1", "dense", units=128, activation="relu"),
        LayerSpec("dropout3", "dropout", rate=0.5),
        LayerSpec("dense2", "dense", units=classes),
    )
    return ModelSpec("s-cnn" if pool == 2 else f"s-cnn-{pool}x{pool}", tuple(input_shape), layers)


def h_cnn(input_shape=(34, 30, 3), classes: int = 100) -> ModelSpec:
    layers = (
        LayerSpec("conv1", "hconv", filters=32, activation="relu"),
        LayerSpec("conv2", "hconv", filters=32, stride=2, activation="relu"),
        LayerSpec("dropout1", "dropout", rate=0.25),
        LayerSpec("conv3", "hconv", filters=64, activation="relu"),
        LayerSpec("pool", "hmaxpool"),
        LayerSpec("dropout2", "dropout", rate=0.25),
        LayerSpec("flatten", "flatten"),
        LayerSpec("dense1", "dense", units=128, activation="relu"),
        LayerSpec("dropout3", "dropout", rate=0.5),
        LayerSpec("dense2", "dense", units=classes),
    )
    return ModelSpec("h-cnn", tuple(input_shape), layers)


PRESETS = {
    "s-cnn": s_cnn,
    "s-cnn-3x3": lambda input_shape=(32, 32, 3), classes=100: s_cnn(input_shape, classes, pool=3),
    "h-cnn": h_cnn,
}


def preset(name: str, input_shape=None, classes: int = 100) -> ModelSpec:
    try:
        build = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(PRESETS)}") from None
    if input_shape is None:
        return build(classes=classes)
    return build(input_shape=tuple(input_shape), classes=classes)


def _group(n: int) -> str:
    return f"{n:,}".replace(",", " ")


def summary(model: ModelSpec) -> str:
    """Layer table: name, type, size/rate, output shape, parameter count."""
    shapes = model.shapes()
    per_layer, total = count_params(model)
    header = ("Layer", "Type", "Size / rate", "Output shape", "Param #")
    rows = [
        (layer.name, layer.type_name, layer.size_label,
         "(" + ", ".join(str(d) for d in shape) + ")", _group(n))
        for layer, shape, (_, n) in zip(model.layers, shapes, per_layer)
    ]
    widths = [max(len(r[c]) for r in rows + [header]) for c in range(5)]

    def fmt(r):
        return "  ".join(r[c].ljust(widths[c]) if c < 4 else r[c].rjust(widths[c]) for c in range(5))

    rule = "-" * len(fmt(header))
    lines = [fmt(header), rule] + [fmt(r) for r in rows] + [rule, f"Total trainable params: {_group(total)}"]
    return "\n".join(lines) + "\n"


# --- runnable model --------------------------------------------------------------------


@dataclass
class Model:
    """A :class:`ModelSpec` with parameters.

    ``params[name]`` is a dict with ``"w"`` and ``"b"``; hexagonal conv
    weights are stored as ``(7, C_in, C_out)`` taps.
    """

    spec: ModelSpec
    params: dict = field(default_factory=dict)

    @classmethod
    def init(cls, spec: ModelSpec, seed: int = 0) -> "Model":
        rng = np.random.default_rng(seed)
        params = {}
        shape = tuple(spec.input_shape)
        for layer in spec.layers:
            if layer.kind == "hconv":
                c_in = shape[2]
                w = glorot_init(7 * c_in, 7 * layer.filters, (7, c_in, layer.filters), rng)
                params[layer.name] = {"w": w, "b": np.zeros(layer.filters)}
            elif layer.kind == "sconv":
                c_in, k = shape[2], layer.size
                w = glorot_init(k * k * c_in, k * k * layer.filters, (k, k, c_in, layer.filters), rng)
                params[layer.name] = {"w": w, "b": np.zeros(layer.filters)}
            elif layer.kind == "dense":
                w = glorot_init(shape[0], layer.units, (shape[0], layer.units), rng)
                params[layer.name] = {"w": w, "b": np.zeros(layer.units)}
            shape = _output_shape(layer, shape)
        return cls(spec, params)

    def forward(self, x, training: bool = False, rng: Optional[np.random.Generator] = None):
        """Logits and the cache needed by :meth:`backward`."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[1:] != tuple(self.spec.input_shape):
            raise ShapeError("input", f"expected (*, {self.spec.input_shape}), got {x.shape}")
        cache = []
        for layer in self.spec.layers:
            p = self.params.get(layer.name)
            k = layer.kind
            entry = {"x": x}
            if k == "hconv":
                x = L.hconv2d_forward(x, L.HexKernelPair(p["w"], p["b"]), layer.stride)
            elif k == "sconv":
                x = L.sconv2d_forward(x, p["w"], p["b"], layer.stride)
            elif k == "hmaxpool":
                x, entry["arg"] = L.hmaxpool_forward(x)
            elif k == "smaxpool":
                x, entry["arg"] = L.smaxpool_forward(x, layer.size, layer.stride)
            elif k == "dropout":
                x, entry["mask"] = L.dropout_forward(x, layer.rate, rng, training)
            elif k == "flatten":
                x = L.flatten_forward(x)
            elif k == "dense":
                x = L.dense_forward(x, p["w"], p["b"])
            if layer.activation == "relu":
                entry["pre"] = x
                x = L.relu_forward(x)
            cache.append(entry)
        return x, cache

    def backward(self, cache, grad):
        grads = {}
        for layer, entry in zip(reversed(self.spec.layers), reversed(cache)):
            if layer.activation == "relu":
                grad = L.relu_backward(entry["pre"], grad)
            x = entry["x"]
            p = self.params.get(layer.name)
            k = layer.kind
            if k == "hconv":
                grad, gw, gb = L.hconv2d_backward(x, L.HexKernelPair(p["w"], p["b"]), layer.stride, grad)
                grads[layer.name] = {"w": gw, "b": gb}
            elif k == "sconv":
                grad, gw, gb = L.sconv2d_backward(x, p["w"], p["b"], layer.stride, grad)
                grads[layer.name] = {"w": gw, "b": gb}
            elif k == "hmaxpool":
                grad = L.hmaxpool_backward(x, entry["arg"], grad)
            elif k == "smaxpool":
                grad = L.smaxpool_backward(x, entry["arg"], grad, layer.size, layer.stride)
            elif k == "dropout":
                grad = L.dropout_backward(entry["mask"], grad)
            elif k == "flatten":
                grad = L.flatten_backward(x.shape, grad)
            elif k == "dense":
                grad, gw, gb = L.dense_backward(x, p["w"], grad)
                grads[layer.name] = {"w": gw, "b": gb}
        return grads, grad

    def predict(self, x, batch_size: int = 256) -> np.ndarray:
        out = [self.forward(x[i : i + batch_size])[0] for i in range(0, len(x), batch_size)]
        return np.concatenate(out, axis=0)
