"""Per-timestep latency measurement.

Each timestep is timed individually with the monotonic nanosecond clock and
classified as presentation or silence, in training or inference mode. The
per-image encoding cost is timed separately.
"""
import csv
import os
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import encoder
from .network import forward_step, silence_step
from .plasticity import EpisodeLedger, apply_plasticity, record_step

CYCLE_CLASSES = ("train_presentation", "train_silence", "infer_presentation", "infer_silence")
CSV_FIELDS = ("cycle_class", "count", "mean_us", "p50_us", "p95_us", "max_us")


@dataclass
class CycleStats:
    count: int
    mean_us: float
    p50_us: float
    p95_us: float
    max_us: float
    min_us: float = float("nan")

    @classmethod
    def from_ns(cls, samples_ns):
        if len(samples_ns) == 0:
            return cls(0, *(float("nan"),) * 5)
        us = np.asarray(samples_ns, dtype=np.float64) / 1e3
        return cls(len(us), float(us.mean()), float(np.percentile(us, 50)),
                   float(np.percentile(us, 95)), float(us.max()), float(us.min()))


@dataclass
class LatencyReport:
    stats: dict  # cycle class -> CycleStats
    host: str = ""
    pinned: bool = False
    encode: CycleStats = None
    samples: dict = field(default_factory=dict, repr=False)

    def summary(self):
        lines = [f"host: {self.host}", f"pinned: {self.pinned}",
                 f"{'cycle_class':<20}{'count':>8}{'mean_us':>10}{'p50_us':>10}{'p95_us':>10}{'max_us':>10}"]
        for name, s in self.stats.items():
            lines.append(f"{name:<20}{s.count:>8}{s.mean_us:>10.2f}{s.p50_us:>10.2f}"
                         f"{s.p95_us:>10.2f}{s.max_us:>10.2f}")
        if self.encode is not None and self.encode.count:
            lines.append(f"encode (per image): count {self.encode.count}, mean {self.encode.mean_us:.2f} us")
        return "\n".join(lines)


def host_description():
    return f"{platform.node()} {platform.machine()} {platform.processor() or ''} " \
           f"python {platform.python_version()} cpus={os.cpu_count()}".strip()


def pin_to_cpu():
    """Pin the process to one CPU where supported; returns whether it worked."""
    if not hasattr(os, "sched_setaffinity"):
        return False
    try:
        cpu = min(os.sched_getaffinity(0))
        os.sched_setaffinity(0, {cpu})
        return True
    except OSError:
        return False


def bench_run(net, images, mode="train", warmup=0, labels=None, rng=None, pin=True):
    """Time every timestep of full 20-step cycles over ``images``.

    ``warmup`` leading timesteps are executed but not recorded. Training mode
    works on a copy of ``net``; inference mode leaves ``net`` untouched.
    """
    images = np.asarray(images)
    if images.size == 0:
        raise ValueError("bench_run needs at least one image")
    images = images.reshape(-1, net.config.n_inputs)
    if mode not in ("train", "infer"):
        raise ValueError(f"mode must be 'train' or 'infer', got {mode!r}")
    if mode == "train" and labels is None:
        raise ValueError("training mode needs labels")
    pinned = pin_to_cpu() if pin else False
    rng = np.random.default_rng(0) if rng is None else rng
    net = net.copy()

    clock = time.perf_counter_ns
    pres, sil, enc = [], [], []
    step_no = 0
    for k, image in enumerate(images):
        t0 = clock()
        schedule = encoder.encode(image)
        enc.append(clock() - t0)
        if mode == "infer" or net.config.reset_between_images:
            net.reset_state()
        ledger = EpisodeLedger(int(labels[k]), net.config.n_inputs) if mode == "train" else None
        for t in range(encoder.CYCLE_STEPS):
            if t < encoder.PRESENTATION_STEPS:
                t0 = clock()
                out = forward_step(net, schedule[t])
                if ledger is not None:
                    record_step(ledger, out, t, schedule[t])
                dt = clock() - t0
                bucket = pres
            else:
                t0 = clock()
                silence_step(net)
                if ledger is not None and t == encoder.LABEL_STEP:
                    apply_plasticity(net, ledger, rng)
                dt = clock() - t0
                bucket = sil
            if step_no >= warmup:
                bucket.append(dt)
            step_no += 1

    stats = {name: CycleStats(0, *(float("nan"),) * 5) for name in CYCLE_CLASSES}
    stats[f"{mode}_presentation"] = CycleStats.from_ns(pres)
    stats[f"{mode}_silence"] = CycleStats.from_ns(sil)
    return LatencyReport(stats, host_description(), pinned, CycleStats.from_ns(enc),
                         {f"{mode}_presentation": pres, f"{mode}_silence": sil})


def merge_reports(*reports):
    """Combine a train-mode and an infer-mode report into one."""
    stats = {name: CycleStats(0, *(float("nan"),) * 5) for name in CYCLE_CLASSES}
    samples, enc = {}, []
    for r in reports:
        for name, s in r.stats.items():
            if s.count:
                stats[name] = s
        samples.update(r.samples)
    encodes = [r.encode for r in reports if r.encode is not None and r.encode.count]
    return LatencyReport(stats, reports[0].host, all(r.pinned for r in reports),
                         encodes[0] if encodes else None, samples)


def timer_overhead_ns(n=100_000):
    """Mean cost of one instrumented no-op timestep (two clock reads + bookkeeping)."""
    clock = time.perf_counter_ns
    bucket = []
    start = clock()
    for _ in range(n):
        t0 = clock()
        dt = clock() - t0
        bucket.append(dt)
    return (clock() - start) / n


def emit_report(report, path):
    """Write the CSV to ``path`` and a readable summary next to it (``.txt``)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_FIELDS)
        for name, s in report.stats.items():
            w.writerow([name, s.count, repr(s.mean_us), repr(s.p50_us), repr(s.p95_us), repr(s.max_us)])
    path.with_suffix(".txt").write_text(report.summary() + "\n")
    return path


def read_report_csv(path):
    out = {}
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            out[row["cycle_class"]] = CycleStats(int(row["count"]), float(row["mean_us"]),
                                                 float(row["p50_us"]), float(row["p95_us"]),
                                                 float(row["max_us"]))
    return out
