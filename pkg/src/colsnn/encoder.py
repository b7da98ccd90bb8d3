"""Deterministic rate coding over the presentation window.

A pixel of intensity ``p`` emits ``round(10 p / 255)`` spikes, spread evenly
over the 10 presentation steps with a floor-difference (Bresenham) rule.
"""
from dataclasses import dataclass

import numpy as np

PRESENTATION_STEPS = 10
SILENCE_STEPS = 10
CYCLE_STEPS = PRESENTATION_STEPS + SILENCE_STEPS
LABEL_STEP = CYCLE_STEPS - 1
MAX_INTENSITY = 255


@dataclass(frozen=True)
class PresentationTiming:
    presentation_steps: int = PRESENTATION_STEPS
    silence_steps: int = SILENCE_STEPS
    label_step: int = LABEL_STEP

    @property
    def cycle_steps(self):
        return self.presentation_steps + self.silence_steps


def spike_count(intensity):
    """Number of spikes for an intensity (scalar or array), rounding half up.

    Uses integer arithmetic so there is no float rounding at all:
    ``floor(10 p / 255 + 1/2) == (20 p + 255) // 510``.
    """
    p = np.asarray(intensity)
    if p.dtype.kind == "f" and not np.all(np.mod(p, 1) == 0):
        raise ValueError("intensity must be integral")
    p = p.astype(np.int64)
    if np.any(p < 0) or np.any(p > MAX_INTENSITY):
        raise ValueError(f"intensity outside [0, {MAX_INTENSITY}]")
    n = (20 * p + MAX_INTENSITY) // (2 * MAX_INTENSITY)
    return int(n) if n.ndim == 0 else n


def spike_steps(n, steps=PRESENTATION_STEPS):
    """Steps (0-based) at which a pixel with ``n`` spikes is active."""
    t = np.arange(steps)
    return np.flatnonzero((t + 1) * n // steps > t * n // steps)


def encode(image) -> np.ndarray:
    """Spike schedule for one image: a ``(10, n_pixels)`` boolean array.

    ``schedule[t]`` is the set of inputs active at presentation step ``t``.
    """
    n = spike_count(np.asarray(image).ravel())
    t = np.arange(PRESENTATION_STEPS)[:, None]
    return (t + 1) * n // PRESENTATION_STEPS > t * n // PRESENTATION_STEPS


def active_inputs(schedule, step):
    return np.flatnonzero(schedule[step])


def eligible_inputs(schedule):
    """Inputs that spike at least once during the window."""
    return schedule.any(axis=0)
