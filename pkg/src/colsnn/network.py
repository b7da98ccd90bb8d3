"""The columnar network: one column of LIF neurons per class.

State is held as dense arrays indexed ``[column, micro, input]`` so a
timestep for all 150 neurons is a single vectorised update.
"""
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import encoder
from .neuron import leak_factor, lif_step
from .resource import ResourceFunctionConfig, derive_weights

INIT_MODES = ("zero", "random")
CKPT_MAGIC = b"COLSNN-CKPT 1\n"


@dataclass(frozen=True)
class NetworkConfig:
    n_columns: int = 10
    n_micro: int = 15
    n_inputs: int = 784
    tau_v: float = 10.0
    resource_fn: ResourceFunctionConfig = field(default_factory=ResourceFunctionConfig)
    d_reward: float = 0.01
    d_punish: float = 0.01
    init_mode: str = "random"
    init_scale: float = 0.01
    seed: int = 0
    eligibility_gated: bool = True
    rew_dedup: bool = False
    reset_between_images: bool = False

    def __post_init__(self):
        for name in ("n_columns", "n_micro", "n_inputs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.tau_v > 0:
            raise ValueError(f"tau_v must be positive, got {self.tau_v}")
        if not (self.d_reward > 0 and self.d_punish >= 0):
            raise ValueError("dopamine quantum must be positive")
        if self.init_mode not in INIT_MODES:
            raise ValueError(f"init_mode must be one of {INIT_MODES}, got {self.init_mode!r}")
        if self.init_scale < 0:
            raise ValueError("init_scale must be >= 0")

    @property
    def n_neurons(self):
        return self.n_columns * self.n_micro

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        d = dataclasses.asdict(self)
        fn = d.pop("resource_fn")
        d.update(resource_fn=fn["kind"], w_min=fn["w_min"], w_max=fn["w_max"])
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        fn = ResourceFunctionConfig(d.pop("resource_fn", "linear"),
                                    float(d.pop("w_min", -0.3)), float(d.pop("w_max", 1.0)))
        return cls(resource_fn=fn, **d)


@dataclass
class StepOutput:
    fired: np.ndarray  # (n_columns, n_micro) bool

    def column_counts(self):
        return self.fired.sum(axis=1)

    def fired_ids(self):
        return [tuple(map(int, ix)) for ix in np.argwhere(self.fired)]


class Network:
    def __init__(self, config: NetworkConfig, resources=None):
        self.config = config
        shape = (config.n_columns, config.n_micro, config.n_inputs)
        if resources is None:
            resources = np.zeros(shape)
        self.resources = np.array(resources, dtype=np.float64).reshape(shape)
        self.weights = derive_weights(self.resources, config.resource_fn)
        self.u = np.zeros(shape[:2])
        self.decay = leak_factor(config.tau_v)
        # instrumentation
        self.timesteps = 0
        self.plasticity_calls = 0

    def refresh_weights(self, index=...):
        self.weights[index] = derive_weights(self.resources[index], self.config.resource_fn)

    def advance(self, drive=None):
        """One LIF step for every neuron given its summed input (None = silence)."""
        if drive is None:
            drive = 0.0
        self.u, fired = lif_step(self.u, drive, self.decay)
        self.timesteps += 1
        return StepOutput(fired)

    def drives(self, schedule):
        """Per-step synaptic input for all neurons, shape ``(steps, n_columns, n_micro)``."""
        flat = self.weights.reshape(self.config.n_neurons, self.config.n_inputs)
        out = schedule.astype(np.float64) @ flat.T
        return out.reshape(len(schedule), self.config.n_columns, self.config.n_micro)

    def reset_state(self):
        self.u[:] = 0.0

    def checksum(self):
        return hash((self.resources.tobytes(), self.weights.tobytes()))

    def copy(self):
        other = Network(self.config, self.resources)
        other.u = self.u.copy()
        return other


def init_network(config: NetworkConfig, rng=None) -> Network:
    """Fresh network. Random init draws resources i.i.d. from U[0, init_scale]."""
    shape = (config.n_columns, config.n_micro, config.n_inputs)
    if config.init_mode == "zero":
        return Network(config, np.zeros(shape))
    if rng is None:
        rng = np.random.default_rng(config.seed)
    return Network(config, rng.uniform(0.0, config.init_scale, size=shape))


def forward_step(net: Network, active_inputs) -> StepOutput:
    active = np.asarray(active_inputs)
    if active.dtype != bool:
        mask = np.zeros(net.config.n_inputs, dtype=bool)
        mask[active.astype(np.intp)] = True
        active = mask
    return net.advance(net.weights[:, :, active].sum(axis=2))


def silence_step(net: Network) -> StepOutput:
    return net.advance(None)


def cycle_spike_counts(net: Network, image, u0=None):
    """Per-column spike counts over a full 20-step cycle, without touching ``net``."""
    schedule = encoder.encode(image)
    drives = net.drives(schedule)
    u = np.zeros(net.u.shape) if u0 is None else np.array(u0, dtype=float)
    counts = np.zeros(net.config.n_columns, dtype=np.int64)
    for t in range(encoder.CYCLE_STEPS):
        u, fired = lif_step(u, drives[t] if t < encoder.PRESENTATION_STEPS else 0.0, net.decay)
        counts += fired.sum(axis=1)
    return counts


def readout(counts):
    """Index of the column with most spikes; ties go to the lowest index."""
    return int(np.argmax(counts))


def infer(net: Network, image) -> int:
    """Predicted class. Each image starts from rest; the network is not modified."""
    return readout(cycle_spike_counts(net, image))


def save_checkpoint(net: Network, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = json.dumps(net.config.to_dict(), sort_keys=True).encode() + b"\n"
    with open(path, "wb") as f:
        f.write(CKPT_MAGIC)
        f.write(header)
        f.write(net.resources.astype("<f8").tobytes())


def load_checkpoint(path) -> Network:
    with open(path, "rb") as f:
        if f.readline() != CKPT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint")
        config = NetworkConfig.from_dict(json.loads(f.readline()))
        payload = f.read()
    expected = config.n_neurons * config.n_inputs * 8
    if len(payload) != expected:
        raise ValueError(f"{path}: expected {expected} bytes of resources, got {len(payload)}")
    return Network(config, np.frombuffer(payload, dtype="<f8"))


def predict_batch(net: Network, images, chunk=1000):
    """``infer`` for many images at once; identical results, vectorised over images."""
    images = np.asarray(images).reshape(-1, net.config.n_inputs)
    flat = net.weights.reshape(net.config.n_neurons, net.config.n_inputs)
    preds = np.empty(len(images), dtype=np.int64)
    for start in range(0, len(images), chunk):
        batch = images[start:start + chunk]
        counts = np.zeros((len(batch), net.config.n_columns), dtype=np.int64)
        schedules = np.stack([encoder.encode(img) for img in batch]).astype(np.float64)
        drives = schedules @ flat.T  # (batch, steps, neurons)
        u = np.zeros((len(batch), net.config.n_neurons))
        for t in range(encoder.CYCLE_STEPS):
            u, fired = lif_step(u, drives[:, t] if t < encoder.PRESENTATION_STEPS else 0.0, net.decay)
            counts += fired.reshape(len(batch), net.config.n_columns, net.config.n_micro).sum(axis=2)
        preds[start:start + len(batch)] = counts.argmax(axis=1)
    return preds
