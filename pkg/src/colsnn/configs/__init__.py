"""Tuned run configurations shipped with the package.

Each ``<name>.cfg`` is the best trial of a random-search sweep recorded in
the repository's ``sweeps/<name>/`` directory.
"""
from importlib import resources

from ..config import parse_config

NAMES = ("linear_random", "classic_random", "linear_zero")
DEFAULT = "linear_random"


def path(name=DEFAULT):
    if name not in NAMES:
        raise ValueError(f"unknown shipped config {name!r}; choose from {NAMES}")
    return resources.files(__name__) / f"{name}.cfg"


def load(name=DEFAULT, env=None):
    return parse_config(path(name).read_text(), env)
