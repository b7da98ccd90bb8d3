import math

import numpy as np
import pytest

from colsnn import encoder
from colsnn.network import (Network, NetworkConfig, StepOutput, cycle_spike_counts, forward_step,
                            infer, init_network, load_checkpoint, predict_batch, readout,
                            save_checkpoint, silence_step)
from colsnn.resource import ResourceFunctionConfig

from conftest import random_images


def cfg(**kw):
    return NetworkConfig(**kw)


def test_shape_and_addressing():
    net = init_network(cfg(init_mode="zero"))
    assert net.config.n_neurons == 150
    assert net.resources.shape == (10, 15, 784)
    net.resources[3, 14, 0] = 1.0
    assert net.resources.reshape(150, 784)[3 * 15 + 14, 0] == 1.0


def test_zero_init_classic_weights_are_w_min():
    net = init_network(cfg(init_mode="zero", resource_fn=ResourceFunctionConfig("classic", -0.3, 1.0)))
    assert np.all(net.weights == -0.3)
    assert np.all(net.u == 0)


def test_zero_init_linear_weights_are_zero():
    net = init_network(cfg(init_mode="zero", resource_fn=ResourceFunctionConfig("linear", -0.3, 1.0)))
    assert np.all(net.weights == 0.0)


def test_random_init_deterministic_and_in_range():
    a = init_network(cfg(seed=7, init_scale=0.05))
    b = init_network(cfg(seed=7, init_scale=0.05))
    assert a.resources.tobytes() == b.resources.tobytes()
    assert a.resources.min() >= 0 and a.resources.max() <= 0.05
    c = init_network(cfg(seed=8, init_scale=0.05))
    assert a.resources.tobytes() != c.resources.tobytes()


def test_invalid_config():
    with pytest.raises(ValueError):
        cfg(init_mode="ones")
    with pytest.raises(ValueError):
        cfg(tau_v=0)
    with pytest.raises(ValueError):
        cfg(d_reward=0)


def test_empty_input_on_fresh_network():
    net = init_network(cfg(init_mode="zero"))
    out = forward_step(net, [])
    assert not out.fired.any() and np.all(net.u == 0)


def test_single_neuron_fires_with_weights_summing_to_1_2():
    net = init_network(cfg(init_mode="zero"))
    net.resources[2, 4, :12] = 0.1
    net.refresh_weights()
    out = forward_step(net, np.arange(12))
    assert out.fired_ids() == [(2, 4)]
    assert net.u[2, 4] == pytest.approx(0.2)


def test_identical_neurons_identical_decisions():
    net = init_network(cfg(init_mode="zero"))
    net.resources[1, 0, :20] = net.resources[1, 1, :20] = 0.07
    net.refresh_weights()
    for _ in range(5):
        out = forward_step(net, np.arange(20))
        assert out.fired[1, 0] == out.fired[1, 1]
        assert net.u[1, 0] == net.u[1, 1]


def test_silence_step_decay():
    net = init_network(cfg(init_mode="zero", tau_v=-1 / math.log(0.9)))
    net.u[:] = 0.8
    out = silence_step(net)
    assert not out.fired.any()
    np.testing.assert_allclose(net.u, 0.72, rtol=1e-12)


def test_silence_from_rest_unchanged():
    net = init_network(cfg(init_mode="zero"))
    silence_step(net)
    assert np.all(net.u == 0)


def test_ten_silence_steps_closed_form():
    net = init_network(cfg(init_mode="zero", tau_v=5.0))
    net.u[:] = 0.99
    for _ in range(10):
        silence_step(net)
    np.testing.assert_allclose(net.u, 0.99 * math.exp(-2), rtol=1e-9)
    assert net.u[0, 0] == pytest.approx(0.134, abs=1e-3)


def test_forward_step_accepts_mask_or_indices(rng):
    net = init_network(cfg(seed=3, init_scale=0.05))
    other = net.copy()
    idx = rng.choice(784, 40, replace=False)
    mask = np.zeros(784, dtype=bool)
    mask[idx] = True
    a, b = forward_step(net, idx), forward_step(other, mask)
    np.testing.assert_array_equal(a.fired, b.fired)
    np.testing.assert_array_equal(net.u, other.u)


def brute_force_counts(net, image):
    """Reference cycle: one forward_step / silence_step at a time on a copy."""
    net = net.copy()
    net.reset_state()
    schedule = encoder.encode(image)
    counts = np.zeros(10, dtype=int)
    for t in range(20):
        out = forward_step(net, np.flatnonzero(schedule[t])) if t < 10 else silence_step(net)
        counts += out.column_counts()
    return counts


def test_infer_selects_column_with_strong_weights():
    image = np.zeros(784, dtype=np.uint8)
    image[100:140] = 200
    net = init_network(cfg(init_mode="zero"))
    net.resources[6, :, 100:140] = 0.05
    net.refresh_weights()
    counts = brute_force_counts(net, image)
    assert np.argmax(counts) == 6 and counts[6] > 0 and counts.sum() == counts[6]
    assert infer(net, image) == 6


def test_infer_tie_goes_to_lowest_column():
    net = init_network(cfg(init_mode="zero"))
    assert infer(net, np.zeros(784, dtype=np.uint8)) == 0
    assert readout(np.array([3, 9, 1, 0, 0, 0, 0, 0, 0, 0])) == 1
    assert readout(np.array([0, 4, 0, 4, 0, 0, 0, 0, 0, 0])) == 1


def test_infer_matches_stepwise_reference_and_batch(rng):
    net = init_network(cfg(seed=11, init_scale=0.08, tau_v=6.0))
    images = random_images(rng, 40)
    fast = [cycle_spike_counts(net, img) for img in images]
    for img, c in zip(images, fast):
        np.testing.assert_array_equal(c, brute_force_counts(net, img))
    np.testing.assert_array_equal(predict_batch(net, images, chunk=7), [infer(net, i) for i in images])


def test_infer_side_effect_free_and_order_independent(rng):
    net = init_network(cfg(seed=2, init_scale=0.08))
    net.u[:] = 0.5
    before = (net.resources.tobytes(), net.weights.tobytes(), net.u.tobytes(), net.timesteps)
    images = random_images(rng, 30)
    preds = [infer(net, i) for i in images]
    assert (net.resources.tobytes(), net.weights.tobytes(), net.u.tobytes(), net.timesteps) == before
    perm = rng.permutation(30)
    np.testing.assert_array_equal(predict_batch(net, images[perm]), np.array(preds)[perm])


def test_scaling_column_weights_never_lowers_its_count(rng):
    for _ in range(20):
        net = init_network(cfg(seed=int(rng.integers(1 << 30)), init_scale=0.06, tau_v=8.0))
        image = random_images(rng, 1)[0]
        col = int(rng.integers(10))
        before = cycle_spike_counts(net, image)[col]
        net.resources[col] *= 1.5
        net.refresh_weights()
        assert cycle_spike_counts(net, image)[col] >= before


def test_checkpoint_round_trip(tmp_path):
    config = cfg(seed=5, init_scale=0.1, resource_fn=ResourceFunctionConfig("classic", -0.25, 0.75), tau_v=3.3)
    net = init_network(config)
    net.resources[0, 0, 0] = -1e-300
    net.refresh_weights()
    save_checkpoint(net, tmp_path / "a" / "seed5.ckpt")
    back = load_checkpoint(tmp_path / "a" / "seed5.ckpt")
    assert back.config == config
    assert back.resources.tobytes() == net.resources.tobytes()
    assert back.weights.tobytes() == net.weights.tobytes()


def test_checkpoint_rejects_garbage(tmp_path):
    (tmp_path / "x").write_bytes(b"hello\n")
    with pytest.raises(ValueError):
        load_checkpoint(tmp_path / "x")


def test_step_output_helpers():
    fired = np.zeros((10, 15), dtype=bool)
    fired[2, [1, 3]] = True
    out = StepOutput(fired)
    assert out.column_counts()[2] == 2
    assert out.fired_ids() == [(2, 1), (2, 3)]
