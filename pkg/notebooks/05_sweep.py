# %% [markdown]
# # Random hyperparameter search
#
# A small version of the sweep that produced the shipped configurations
# (those used 50 trials; see ``sweeps/run_sweeps.sh``). Trials train on a
# slice of the training set and are scored on the last 5,000 training images.

# %%
import os

import numpy as np

from colsnn import mnist_io, trainer
from colsnn.network import NetworkConfig

data_dir = os.environ.get("COLSNN_DATA_DIR", "data/mnist")
budget = int(os.environ.get("BUDGET", "6"))
train = mnist_io.load_split(data_dir, "train")
fit, val = train[:3000], train[55000:]

result = trainer.sweep(NetworkConfig(), trainer.DEFAULT_SPACE, budget, np.random.default_rng(0), fit, val,
                       log_path="runs/notebooks/sweep_trials.csv")
for cfg, score, _ in sorted(result.trials, key=lambda t: -t[1]):
    print(f"{score:6.2f}%  tau_v={cfg.tau_v:6.2f} d={cfg.d_reward:.4f} "
          f"w=[{cfg.resource_fn.w_min:+.2f}, {cfg.resource_fn.w_max:.2f}] init={cfg.init_scale:.4f}")
print("best:", result.best_config)
