"""Training, evaluation, multi-seed experiments and a random-search sweep."""
import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .mnist_io import N_CLASSES
from .network import NetworkConfig, init_network, predict_batch, save_checkpoint
from .plasticity import train_on_image

log = logging.getLogger(__name__)


def seed_streams(seed):
    """Independent generators for weight init, plasticity choices and data order."""
    init, plast, order = np.random.SeedSequence(seed).spawn(3)
    return (np.random.default_rng(init), np.random.default_rng(plast),
            np.random.default_rng(order))


def build_network(config: NetworkConfig):
    init_rng, plast_rng, order_rng = seed_streams(config.seed)
    return init_network(config, init_rng), plast_rng, order_rng


def train_epoch(net, trainset, rng, order=None, update_log=None):
    """One pass over ``trainset``; ``order`` optionally permutes presentation."""
    idx = range(len(trainset)) if order is None else order
    for i in idx:
        train_on_image(net, trainset.images[i], trainset.labels[i], rng, update_log)
    return net


@dataclass
class Metrics:
    confusion: np.ndarray  # rows: true class, cols: predicted

    @classmethod
    def from_predictions(cls, labels, preds, n_classes=N_CLASSES):
        confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
        np.add.at(confusion, (np.asarray(labels, dtype=np.intp), np.asarray(preds, dtype=np.intp)), 1)
        return cls(confusion)

    @property
    def overall_accuracy(self):
        total = self.confusion.sum()
        return 100.0 * np.trace(self.confusion) / total if total else 0.0

    @property
    def per_class_accuracy(self):
        rows = self.confusion.sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            acc = 100.0 * np.diag(self.confusion) / rows
        return np.where(rows > 0, acc, 0.0)

    def to_dict(self):
        return {"overall_accuracy": float(self.overall_accuracy),
                "per_class_accuracy": [float(a) for a in self.per_class_accuracy],
                "confusion": self.confusion.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["confusion"], dtype=np.int64))

    def __eq__(self, other):
        return isinstance(other, Metrics) and np.array_equal(self.confusion, other.confusion)


def evaluate(net, testset) -> Metrics:
    return Metrics.from_predictions(testset.labels, predict_batch(net, testset.images))


@dataclass
class ExperimentReport:
    runs: list
    seeds: list = field(default_factory=list)

    @property
    def n_runs(self):
        return len(self.runs)

    @property
    def std_defined(self):
        return self.n_runs >= 2

    def _table(self):
        return np.array([[r.overall_accuracy, *r.per_class_accuracy] for r in self.runs])

    @property
    def mean(self):
        """Mean of ``[overall, class 0, ..., class 9]``."""
        return self._table().mean(axis=0)

    @property
    def std(self):
        """Sample std (ddof=1); zeros when fewer than two runs."""
        if not self.std_defined:
            return np.zeros(N_CLASSES + 1)
        return self._table().std(axis=0, ddof=1)

    def format_table(self):
        head = "     " + "".join(f"{h:>7}" for h in ["avg", *map(str, range(N_CLASSES))])
        acc = "acc  " + "".join(f"{v:7.2f}" for v in self.mean)
        std = "std  " + "".join(f"{v:7.2f}" for v in self.std)
        if not self.std_defined:
            std += "   (single run: std undefined)"
        return "\n".join([head, acc, std])

    def to_dict(self):
        return {"seeds": list(self.seeds), "mean": self.mean.tolist(), "std": self.std.tolist(),
                "std_defined": self.std_defined, "runs": [r.to_dict() for r in self.runs]}

    def write(self, out_dir):
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(json.dumps(self.to_dict(), indent=1))
        with open(out_dir / "report.csv", "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["run", "seed", "avg", *map(str, range(N_CLASSES))])
            for i, (seed, r) in enumerate(zip(self.seeds, self.runs)):
                w.writerow([i, seed, f"{r.overall_accuracy:.4f}", *(f"{a:.4f}" for a in r.per_class_accuracy)])
            w.writerow(["mean", "", *(f"{v:.4f}" for v in self.mean)])
            w.writerow(["std", "", *(f"{v:.4f}" for v in self.std)])


def train_and_evaluate(config, trainset, testset, shuffle=False, ckpt_path=None):
    net, plast_rng, order_rng = build_network(config)
    order = order_rng.permutation(len(trainset)) if shuffle else None
    train_epoch(net, trainset, plast_rng, order)
    if ckpt_path is not None:
        save_checkpoint(net, ckpt_path)
    return evaluate(net, testset), net


def _run_one(args):
    config, trainset, testset, shuffle, ckpt_path = args
    metrics, _ = train_and_evaluate(config, trainset, testset, shuffle, ckpt_path)
    log.info("seed %d: %.2f%%", config.seed, metrics.overall_accuracy)
    return metrics


def _map(fn, jobs, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def run_experiment(config, trainset, testset, n_runs, shuffle=False, out_dir=None, workers=1):
    """Repeat train+evaluate with seeds ``config.seed, config.seed + 1, ...``."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    seeds = [config.seed + k for k in range(n_runs)]
    jobs = [(config.replace(seed=s), trainset, testset, shuffle,
             None if out_dir is None else Path(out_dir) / f"seed{s}.ckpt") for s in seeds]
    report = ExperimentReport(_map(_run_one, jobs, workers), seeds)
    if out_dir is not None:
        report.write(out_dir)
    return report


# -- random search -------------------------------------------------------

DEFAULT_SPACE = {
    "tau_v": ("log", 2.0, 50.0),
    "d_reward": ("log", 1e-3, 5e-2),
    "w_min": ("uniform", -1.0, 0.0),
    "w_max": ("log", 0.1, 2.0),
    "init_scale": ("log", 1e-3, 1e-1),
}


def sample_config(base, space, rng):
    values = {}
    for key, spec in space.items():
        kind, *args = spec
        if kind == "uniform":
            values[key] = float(rng.uniform(*args))
        elif kind == "log":
            lo, hi = args
            values[key] = float(math.exp(rng.uniform(math.log(lo), math.log(hi))))
        elif kind == "choice":
            values[key] = args[0][int(rng.integers(len(args[0])))]
        elif kind == "fixed":
            values[key] = args[0]
        else:
            raise ValueError(f"unknown search kind {kind!r} for {key}")
    return apply_overrides(base, values)


def apply_overrides(base, values):
    d = base.to_dict()
    values = dict(values)
    if "d_reward" in values and "d_punish" not in values and base.d_punish == base.d_reward:
        values["d_punish"] = values["d_reward"]
    d.update(values)
    return NetworkConfig.from_dict(d)


@dataclass
class SweepResult:
    best_config: NetworkConfig
    best_score: float
    trials: list  # (config, subset score, refined score or None)

    def write_log(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        keys = list(self.trials[0][0].to_dict())
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["trial", *keys, "accuracy", "refined_accuracy"])
            for i, (cfg, score, refined) in enumerate(self.trials):
                d = cfg.to_dict()
                w.writerow([i, *(d[k] for k in keys), f"{score:.4f}",
                            "" if refined is None else f"{refined:.4f}"])


def _score_trial(args):
    config, trainset, valset = args
    metrics, _ = train_and_evaluate(config, trainset, valset)
    log.info("trial on %d images: %.2f%% (tau_v=%.3g d=%.3g w=[%.3g, %.3g] init=%.3g)", len(trainset),
             metrics.overall_accuracy, config.tau_v, config.d_reward, config.resource_fn.w_min,
             config.resource_fn.w_max, config.init_scale)
    return metrics.overall_accuracy


def sweep(base_config, space, budget, rng, trainset, valset, workers=1, log_path=None,
          refine_top=0, refine_set=None):
    """Random search: sample ``budget`` configs, keep the best validation accuracy.

    Every trial trains with ``base_config.seed`` so identical configs score
    identically. With ``refine_top > 0`` the best trials are retrained on
    ``refine_set`` (a larger training set) and ranked by that score instead;
    short-run winners do not always hold up over a full epoch.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if not space:
        raise ValueError("empty search space")
    configs = [sample_config(base_config, space, rng) for _ in range(budget)]
    scores = _map(_score_trial, [(c, trainset, valset) for c in configs], workers)
    refined = [None] * budget
    if refine_top > 0:
        if refine_set is None:
            raise ValueError("refine_top needs a refine_set")
        top = sorted(range(budget), key=lambda i: -scores[i])[:refine_top]
        for i, score in zip(top, _map(_score_trial, [(configs[i], refine_set, valset) for i in top], workers)):
            refined[i] = score
        best = max(top, key=lambda i: refined[i])
        best_score = refined[best]
    else:
        best = int(np.argmax(scores))
        best_score = scores[best]
    result = SweepResult(configs[best], best_score, list(zip(configs, scores, refined)))
    if log_path is not None:
        result.write_log(log_path)
    return result
