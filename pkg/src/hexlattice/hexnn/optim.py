"""Glorot initialisation and Adam."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def glorot_init(fan_in: int, fan_out: int, shape, seed) -> np.ndarray:
    """Uniform draw in +-sqrt(6 / (fan_in + fan_out)).

    ``seed`` is an int or a ``numpy.random.Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


@dataclass
class AdamConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class AdamState:
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(params: dict, grads: dict, state: AdamState, config: AdamConfig = AdamConfig()):
    """One bias-corrected Adam update, in place.

    ``params`` and ``grads`` are ``{layer: {name: array}}``; parameters
    without a gradient are left alone.
    """
    state.t += 1
    b1, b2 = config.beta1, config.beta2
    c1 = 1.0 - b1**state.t
    c2 = 1.0 - b2**state.t
    for layer, g_layer in grads.items():
        for name, g in g_layer.items():
            key = (layer, name)
            m = state.m.get(key)
            if m is None:
                m = state.m[key] = np.zeros_like(g)
                state.v[key] = np.zeros_like(g)
            v = state.v[key]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            params[layer][name] -= config.lr * (m / c1) / (np.sqrt(v / c2) + config.eps)
    return params, state
