# %% [markdown]
# # Receptive fields
#
# Zero-initialised weights make the learned fields easy to read: every
# synapse starts white and only moves when a reward or punishment reaches it.
# Writes ``runs/notebooks/fields.ppm`` (one row per class, one cell per neuron).

# %%
import os
from pathlib import Path

import numpy as np

from colsnn import configs, mnist_io, trainer, viz

data_dir = os.environ.get("COLSNN_DATA_DIR", "data/mnist")
limit = int(os.environ.get("TRAIN_LIMIT", "6000"))
train = mnist_io.load_split(data_dir, "train")
subset = train[:limit] if limit else train

cfg = configs.load("linear_zero").network_config()
net, plast_rng, _ = trainer.build_network(cfg)
trainer.train_epoch(net, subset, plast_rng)

out = Path("runs/notebooks")
viz.render_heatmaps(net, out / "fields.ppm", scale=3)
print("wrote", out / "fields.ppm")

# %% How much does each column look like its digit?
means = viz.class_means(train)
r, _ = viz.field_similarity(net, means)
intra = viz.intra_column_similarity(net)
for c in range(10):
    print(f"class {c}: field vs class-mean r = {r[c]:.3f}, mean pairwise r inside column = {intra[c]:.3f}")
print(f"mean r {r.mean():.3f}")

# %% Baseline: untrained random networks
baseline = [viz.field_similarity(trainer.build_network(cfg.replace(init_mode="random", init_scale=1.0,
                                                                   seed=s))[0], means)[0].mean()
            for s in range(20)]
print("random-network mean r:", np.round(baseline, 3))

# %% A text rendering of column 0, neuron 0
w = net.weights[0, 0].reshape(28, 28)
scale = np.abs(w).max() or 1
for row in w:
    print("".join("+" if v > 0.3 * scale else "-" if v < -0.3 * scale else "." for v in row))
