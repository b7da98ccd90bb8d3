# %% [markdown]
# # One-epoch training and evaluation
#
# Trains the tuned linear-resource / random-init configuration on a slice of
# the training set (``TRAIN_LIMIT``, default 6000; 0 means all 60,000) and
# prints the per-class table.

# %%
import os
import time

import numpy as np

from colsnn import configs, mnist_io, trainer
from colsnn.plasticity import train_on_image

data_dir = os.environ.get("COLSNN_DATA_DIR", "data/mnist")
limit = int(os.environ.get("TRAIN_LIMIT", "6000"))
train = mnist_io.load_split(data_dir, "train")
test = mnist_io.load_split(data_dir, "test")
if limit:
    train = train[:limit]

cfg = configs.load("linear_random").network_config()
print(cfg)

# %% Train, keeping the per-image update log
net, plast_rng, _ = trainer.build_network(cfg)
log = []
start = time.perf_counter()
trainer.train_epoch(net, train, plast_rng, update_log=log)
print(f"{len(train)} images in {time.perf_counter() - start:.1f}s, "
      f"{net.timesteps} timesteps, {net.plasticity_calls} plasticity calls")

kinds = [u.kind for u in log]
print("group rewards:", kinds.count("group_reward"), " single rewards:", kinds.count("single_reward"))
print("mean punished neurons per image:", np.mean([len(u.punished) for u in log]).round(2))
print("first updates:")
for i, u in enumerate(log[:5]):
    print("  ", u.log_line(i))

# %% Group rewards die out as columns learn to respond
window = 500
for start in range(0, len(log), max(window, len(log) // 10)):
    chunk = kinds[start:start + window]
    print(f"images {start:5d}-{start + len(chunk):5d}: group share {chunk.count('group_reward') / len(chunk):.2f}")

# %% Evaluate
metrics = trainer.evaluate(net, test)
print(trainer.ExperimentReport([metrics], [cfg.seed]).format_table())
print("confusion (rows = true class):")
print(metrics.confusion)
