"""Synaptic resource to weight mappings.

Plasticity acts on an unbounded resource ``W``; the effective weight is a
bounded function of it. ``classic`` saturates smoothly towards ``w_max``,
``linear`` simply clamps.
"""
from dataclasses import dataclass

import numpy as np

KINDS = ("classic", "linear")


@dataclass(frozen=True)
class ResourceFunctionConfig:
    kind: str = "linear"
    w_min: float = -0.3
    w_max: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"resource function must be one of {KINDS}, got {self.kind!r}")
        if not self.w_min < self.w_max:
            raise ValueError(f"need w_min < w_max, got {self.w_min} >= {self.w_max}")

    def __call__(self, W):
        return derive_weights(W, self)


def weight_classic(W, cfg):
    span = cfg.w_max - cfg.w_min
    pos = np.maximum(W, 0.0)
    return cfg.w_min + span * pos / (span + pos)


def weight_linear(W, cfg):
    return np.minimum(cfg.w_max, np.maximum(cfg.w_min, W))


def derive_weights(W, cfg):
    if cfg.kind == "classic":
        return weight_classic(W, cfg)
    return weight_linear(W, cfg)
