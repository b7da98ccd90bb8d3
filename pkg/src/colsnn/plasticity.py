"""Reward / punishment learning applied once per image at the label step.

During the 10 presentation steps every spike is booked: spikes in the
label's column go to ``rew`` (a list, so frequent firers are more likely to
win), spikes elsewhere to ``pun`` (a set). At step 19 either one random
``rew`` entry is potentiated, or, if the label column stayed silent, the
whole column is. Every neuron in ``pun`` is depressed.
"""
from dataclasses import dataclass, field

import numpy as np

from . import encoder


class PlasticityUsageError(RuntimeError):
    pass


@dataclass
class EpisodeLedger:
    label: int
    n_inputs: int = 784
    rew: list = field(default_factory=list)
    pun: set = field(default_factory=set)
    eligibility: np.ndarray = None
    applied: bool = False

    def __post_init__(self):
        if self.eligibility is None:
            self.eligibility = np.zeros(self.n_inputs, dtype=bool)


@dataclass
class PlasticityUpdate:
    kind: str  # "single_reward" | "group_reward"
    rewarded: tuple
    punished: frozenset
    quantum: float
    label: int = -1

    def log_line(self, index):
        rewarded = ";".join(f"{c}:{m}" for c, m in self.rewarded)
        return f"{index},{self.kind},{rewarded},{len(self.punished)}"


def record_step(ledger: EpisodeLedger, out, step, active=None):
    """Book one presentation step's spikes (``out`` is a StepOutput)."""
    if not 0 <= step < encoder.PRESENTATION_STEPS:
        raise PlasticityUsageError(f"step {step} is outside the presentation window")
    if active is not None:
        ledger.eligibility |= np.asarray(active, dtype=bool)
    if not out.fired.any():
        return ledger
    for c, m in np.argwhere(out.fired):
        nid = (int(c), int(m))
        if c == ledger.label:
            ledger.rew.append(nid)
        else:
            ledger.pun.add(nid)
    return ledger


def apply_plasticity(net, ledger: EpisodeLedger, rng) -> PlasticityUpdate:
    if ledger.applied:
        raise PlasticityUsageError("plasticity already applied for this image")
    ledger.applied = True
    cfg = net.config
    label = ledger.label
    inputs = ledger.eligibility if cfg.eligibility_gated else np.ones(cfg.n_inputs, dtype=bool)

    if not ledger.rew:
        kind = "group_reward"
        rewarded = tuple((label, m) for m in range(cfg.n_micro))
        micro = np.arange(cfg.n_micro)
    else:
        kind = "single_reward"
        pool = list(dict.fromkeys(ledger.rew)) if cfg.rew_dedup else ledger.rew
        winner = pool[int(rng.integers(len(pool)))]
        rewarded = (winner,)
        micro = np.array([winner[1]])
    punished = frozenset(ledger.pun)

    cols = np.flatnonzero(inputs)
    if cols.size:
        _bump(net, np.full(micro.size, label), micro, cols, cfg.d_reward)
        if punished:
            pc, pm = np.array(sorted(punished)).T
            _bump(net, pc, pm, cols, -cfg.d_punish)
    net.plasticity_calls += 1
    return PlasticityUpdate(kind, rewarded, punished, cfg.d_reward, label)


def _bump(net, col, micro, inputs, delta):
    rows = net.resources[col, micro]
    rows[:, inputs] += delta
    net.resources[col, micro] = rows
    net.weights[col, micro] = net.config.resource_fn(rows)


def train_on_image(net, image, label, rng, log=None) -> PlasticityUpdate:
    """Run one full 20-step training cycle for a single image."""
    schedule = encoder.encode(image)
    if net.config.reset_between_images:
        net.reset_state()
    drives = net.drives(schedule)
    ledger = EpisodeLedger(int(label), net.config.n_inputs)
    update = None
    for t in range(encoder.CYCLE_STEPS):
        if t < encoder.PRESENTATION_STEPS:
            out = net.advance(drives[t])
            record_step(ledger, out, t, schedule[t])
        else:
            net.advance(None)
        if t == encoder.LABEL_STEP:
            update = apply_plasticity(net, ledger, rng)
    if log is not None:
        log.append(update)
    return update
