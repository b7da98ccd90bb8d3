"""Discrete-time leaky integrate-and-fire dynamics with delta synapses.

One step: exact exponential leak over a unit timestep, then the summed
weights of the synapses that spiked this step are added. Crossing the
threshold of 1 emits a spike and subtracts 1 (at most once per step).
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .resource import ResourceFunctionConfig, derive_weights

THRESHOLD = 1.0


def leak_factor(tau_v):
    if not tau_v > 0:
        raise ValueError(f"tau_v must be positive, got {tau_v}")
    return math.exp(-1.0 / tau_v)


def lif_step(u, input_sum, decay):
    """Advance membrane potential(s) ``u`` by one step.

    Works on scalars or arrays. Returns ``(u_new, fired)``.
    """
    # nan/inf anywhere propagates into the sum
    if not np.isfinite(np.sum(input_sum)):
        raise FloatingPointError("non-finite synaptic input")
    u_new = u * decay + input_sum
    fired = u_new > THRESHOLD
    u_new = u_new - fired
    if np.ndim(u_new) == 0:
        return float(u_new), bool(fired)
    return u_new, fired


def weighted_input(weights, active):
    """Sum of ``weights[..., i]`` over the active input indices (or boolean mask)."""
    active = np.asarray(active)
    if active.dtype == bool:
        return weights[..., active].sum(axis=-1)
    if active.size == 0:
        return np.zeros(weights.shape[:-1]) if weights.ndim > 1 else 0.0
    return weights[..., active.astype(np.intp)].sum(axis=-1)


@dataclass
class LifState:
    tau_v: float
    u: float = 0.0

    def __post_init__(self):
        self.decay = leak_factor(self.tau_v)

    def step(self, input_sum):
        self.u, fired = lif_step(self.u, input_sum, self.decay)
        return fired


@dataclass
class SynapseArray:
    """Resources of one neuron's synapses with the weights derived from them."""

    resources: np.ndarray
    fn: ResourceFunctionConfig = field(default_factory=ResourceFunctionConfig)

    def __post_init__(self):
        self.resources = np.asarray(self.resources, dtype=float)
        self.weights = derive_weights(self.resources, self.fn)

    def add(self, idx, delta):
        self.resources[idx] += delta
        self.weights[idx] = derive_weights(self.resources[idx], self.fn)

    def input_sum(self, active):
        return weighted_input(self.weights, active)
