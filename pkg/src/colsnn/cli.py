"""Command line entry point: ``colsnn {train,eval,bench,sweep,heatmap}``."""
import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, config, mnist_io, trainer, viz
from .network import load_checkpoint


class UsageError(Exception):
    pass


def _data_dir(args, cfg=None):
    if getattr(args, "data", None):
        return args.data
    if os.environ.get(config.DATA_DIR_ENV):
        return os.environ[config.DATA_DIR_ENV]
    return cfg.data_dir if cfg is not None else "data/mnist"


def _load_cfg(args):
    cfg = config.load_config(args.config) if args.config else config.RunConfig()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "n_runs", None) is not None:
        cfg.n_runs = args.n_runs
    if getattr(args, "out", None):
        cfg.out_dir = args.out
    return cfg


def cmd_train(args):
    cfg = _load_cfg(args)
    data = _data_dir(args, cfg)
    train = mnist_io.load_split(data, "train")
    test = mnist_io.load_split(data, "test")
    if cfg.train_limit:
        train = train[:cfg.train_limit]
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg.write(out / "run.cfg")
    report = trainer.run_experiment(cfg.network_config(), train, test, cfg.n_runs,
                                    shuffle=cfg.shuffle, out_dir=out, workers=cfg.workers)
    print(report.format_table())
    return 0


def cmd_eval(args):
    net = load_checkpoint(args.ckpt)
    test = mnist_io.load_split(_data_dir(args), "test")
    metrics = trainer.evaluate(net, test)
    report = trainer.ExperimentReport([metrics], [net.config.seed])
    print(report.format_table())
    if args.out:
        report.write(args.out)
    return 0


def _bench_net(args):
    if args.ckpt:
        return load_checkpoint(args.ckpt)
    cfg = _load_cfg(args)
    return trainer.build_network(cfg.network_config())[0]


def cmd_bench(args):
    net = _bench_net(args)
    test = mnist_io.load_split(_data_dir(args), "test")[:args.images]
    reports = []
    if args.mode in ("train", "both"):
        reports.append(bench.bench_run(net, test.images, "train", args.warmup, labels=test.labels))
    if args.mode in ("infer", "both"):
        reports.append(bench.bench_run(net, test.images, "infer", args.warmup))
    report = bench.merge_reports(*reports)
    print(report.summary())
    if args.out:
        bench.emit_report(report, args.out)
    return 0


def cmd_sweep(args):
    cfg = _load_cfg(args)
    data = _data_dir(args, cfg)
    train = mnist_io.load_split(data, "train")
    if args.subset + args.val > len(train):
        raise ValueError(f"subset {args.subset} + val {args.val} exceeds {len(train)} training images")
    fit, val = train[:args.subset], train[len(train) - args.val:]
    refine = train[:len(train) - args.val] if args.refine_top else None
    space = json.loads(Path(args.space).read_text()) if args.space else trainer.DEFAULT_SPACE
    out = Path(args.out or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    provenance = config.RunConfig.from_network_config(cfg.network_config(), train_limit=args.subset)
    provenance.write(out / "sweep.cfg")
    (out / "space.json").write_text(json.dumps({k: list(v) for k, v in space.items()}, indent=1) + "\n")
    result = trainer.sweep(cfg.network_config(), space, args.budget, np.random.default_rng(args.sweep_seed),
                           fit, val, workers=cfg.workers, log_path=out / "sweep_trials.csv",
                           refine_top=args.refine_top, refine_set=refine)
    best = config.RunConfig.from_network_config(
        result.best_config, n_runs=cfg.n_runs, shuffle=cfg.shuffle, workers=cfg.workers,
        out_dir=f"runs/{out.name}")
    best.write(out / "best.cfg")
    print(f"best validation accuracy {result.best_score:.2f}% -> {out / 'best.cfg'}")
    return 0


def cmd_heatmap(args):
    net = load_checkpoint(args.ckpt)
    viz.render_heatmaps(net, args.out, scale=args.scale)
    print(f"wrote {args.out}")
    if args.similarity:
        means = viz.class_means(mnist_io.load_split(_data_dir(args), "train"))
        r, _ = viz.field_similarity(net, means)
        intra = viz.intra_column_similarity(net)
        print("class  field_r  intra_r")
        for c in range(len(r)):
            print(f"{c:>5}  {r[c]:7.3f}  {intra[c]:7.3f}")
        print(f"mean   {r.mean():7.3f}  {intra.mean():7.3f}")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="colsnn", description="Columnar spiking network on MNIST")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--data", help=f"MNIST directory (or ${config.DATA_DIR_ENV})")

    t = sub.add_parser("train", help="train one epoch per seed, evaluate, save checkpoints")
    common(t)
    t.add_argument("--config")
    t.add_argument("--out")
    t.add_argument("--seed", type=int)
    t.add_argument("--n-runs", type=int)
    t.set_defaults(fn=cmd_train)

    e = sub.add_parser("eval", help="evaluate a checkpoint on the test split")
    common(e)
    e.add_argument("--ckpt", required=True)
    e.add_argument("--out", help="directory for report.json / report.csv")
    e.set_defaults(fn=cmd_eval)

    b = sub.add_parser("bench", help="per-timestep latency")
    common(b)
    b.add_argument("--ckpt")
    b.add_argument("--config")
    b.add_argument("--mode", choices=("train", "infer", "both"), default="both")
    b.add_argument("--images", type=int, default=100)
    b.add_argument("--warmup", type=int, default=200)
    b.add_argument("--out", help="latency CSV path")
    b.set_defaults(fn=cmd_bench)

    s = sub.add_parser("sweep", help="random hyperparameter search on a training subset")
    common(s)
    s.add_argument("--config")
    s.add_argument("--budget", type=int, default=50)
    s.add_argument("--subset", type=int, default=6000)
    s.add_argument("--val", type=int, default=5000, help="validation images from the end of train")
    s.add_argument("--refine-top", type=int, default=0,
                   help="retrain the N best trials on all non-validation training images")
    s.add_argument("--space", help="JSON search space")
    s.add_argument("--sweep-seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_sweep)

    h = sub.add_parser("heatmap", help="render receptive fields as a PPM image")
    common(h)
    h.add_argument("--ckpt", required=True)
    h.add_argument("--out", required=True)
    h.add_argument("--scale", type=int, default=4)
    h.add_argument("--similarity", action="store_true", help="also print field/class-mean correlations")
    h.set_defaults(fn=cmd_heatmap)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "fn", None):
            raise UsageError("a subcommand is required")
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(f"colsnn: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    try:
        return args.fn(args)
    except (OSError, ValueError) as exc:
        print(f"colsnn: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
