"""Flat ``key = value`` run configuration files.

Lines starting with ``#`` are comments. Unknown keys are an error.
``COLSNN_DATA_DIR`` in the environment overrides ``data_dir``.
"""
import dataclasses
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .network import NetworkConfig

DATA_DIR_ENV = "COLSNN_DATA_DIR"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    # network
    n_columns: int = 10
    n_micro: int = 15
    n_inputs: int = 784
    tau_v: float = 10.0
    resource_fn: str = "linear"
    w_min: float = -0.3
    w_max: float = 1.0
    d_reward: float = 0.01
    d_punish: float = 0.01
    init_mode: str = "random"
    init_scale: float = 0.01
    seed: int = 0
    eligibility_gated: bool = True
    rew_dedup: bool = False
    reset_between_images: bool = False
    # run
    data_dir: str = "data/mnist"
    out_dir: str = "runs/default"
    n_runs: int = 1
    shuffle: bool = False
    train_limit: int = 0
    workers: int = 1

    def network_config(self) -> NetworkConfig:
        keys = set(NetworkConfig().to_dict())
        return NetworkConfig.from_dict({k: v for k, v in dataclasses.asdict(self).items() if k in keys})

    @classmethod
    def from_network_config(cls, net_cfg, **run):
        return cls(**net_cfg.to_dict(), **run)

    def to_text(self):
        return "".join(f"{f.name} = {_format(getattr(self, f.name))}\n" for f in fields(self))

    def write(self, path):
        Path(path).write_text(self.to_text())


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _convert(name, typ, raw):
    try:
        if typ in (bool, "bool"):
            low = raw.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if typ in (int, "int"):
            return int(raw)
        if typ in (float, "float"):
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None


def parse_config(text, env=None) -> RunConfig:
    types = {f.name: f.type for f in fields(RunConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, types[key], raw)
    env = os.environ if env is None else env
    if env.get(DATA_DIR_ENV):
        values["data_dir"] = env[DATA_DIR_ENV]
    cfg = RunConfig(**values)
    cfg.network_config()  # validate
    return cfg


def load_config(path, env=None) -> RunConfig:
    return parse_config(Path(path).read_text(), env)
