# %% [markdown]
# # Spike encoding and the LIF neuron
#
# A digit is turned into a 10-step spike schedule; every pixel fires a number
# of times proportional to its intensity, evenly spaced. We then drive a single
# leaky integrate-and-fire neuron with it.

# %%
import os

import numpy as np

from colsnn import encoder, mnist_io
from colsnn.neuron import LifState, SynapseArray
from colsnn.resource import ResourceFunctionConfig

data_dir = os.environ.get("COLSNN_DATA_DIR", "data/mnist")
test = mnist_io.load_split(data_dir, "test")
image, label = test.images[0], int(test.labels[0])
print("label", label)

# %% Spike counts per intensity level
for p in (0, 13, 64, 128, 200, 255):
    n = encoder.spike_count(p)
    print(f"intensity {p:3d} -> {n:2d} spikes at steps {encoder.spike_steps(n).tolist()}")

# %% The schedule for the digit, one row per step
schedule = encoder.encode(image)
print("active inputs per step:", schedule.sum(axis=1).tolist())
print("eligible inputs:", int(encoder.eligible_inputs(schedule).sum()))
print("step 0 as a 28x28 bitmap:")
for row in schedule[0].reshape(28, 28):
    print("".join("#" if v else "." for v in row))

# %% One neuron over a full 20-step cycle
rng = np.random.default_rng(0)
syn = SynapseArray(rng.uniform(0, 0.02, 784), ResourceFunctionConfig("linear", -0.3, 0.5))
cell = LifState(tau_v=8.0)
trace = []
for t in range(encoder.CYCLE_STEPS):
    drive = syn.input_sum(schedule[t]) if t < encoder.PRESENTATION_STEPS else 0.0
    fired = cell.step(drive)
    trace.append((t, round(drive, 3), round(cell.u, 3), fired))
for t, drive, u, fired in trace:
    print(f"t={t:2d} input={drive:6.3f} u={u:6.3f} {'spike' if fired else ''}")
