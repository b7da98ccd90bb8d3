# %% [markdown]
# # Per-timestep latency
#
# Every timestep is timed on its own. Presentation steps in training mode do
# the most work (input summation plus bookkeeping); silence steps only leak.
# Writes ``runs/notebooks/latency.csv``.

# %%
import os

from colsnn import bench, configs, mnist_io, trainer

data_dir = os.environ.get("COLSNN_DATA_DIR", "data/mnist")
test = mnist_io.load_split(data_dir, "test")[:100]
net = trainer.build_network(configs.load().network_config())[0]

train_report = bench.bench_run(net, test.images, "train", warmup=200, labels=test.labels)
infer_report = bench.bench_run(net, test.images, "infer", warmup=200)
report = bench.merge_reports(train_report, infer_report)
print(report.summary())
bench.emit_report(report, "runs/notebooks/latency.csv")

# %%
s = report.stats
print(f"silence / train presentation: {s['train_silence'].mean_us / s['train_presentation'].mean_us:.2f}")
print(f"infer / train presentation:   {s['infer_presentation'].mean_us / s['train_presentation'].mean_us:.2f}")
print(f"timer overhead per sample:    {bench.timer_overhead_ns():.0f} ns")
