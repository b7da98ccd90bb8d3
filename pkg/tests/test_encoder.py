import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from colsnn import encoder
from colsnn.encoder import encode, spike_count


def count_oracle(p):
    return math.floor(Fraction(10 * p, 255) + Fraction(1, 2))


def placement_oracle(n, steps=10):
    """Accumulate n/steps per step; a spike is due whenever the running total crosses an integer."""
    acc, emitted, active = Fraction(0), 0, []
    for t in range(steps):
        acc += Fraction(n, steps)
        if math.floor(acc) > emitted:
            active.append(t)
            emitted = math.floor(acc)
    return active


def test_spike_count_endpoints():
    assert spike_count(0) == 0
    assert spike_count(255) == 10
    assert spike_count(128) == 5


def test_spike_count_matches_exact_rational_rounding():
    got = spike_count(np.arange(256))
    assert got.tolist() == [count_oracle(p) for p in range(256)]
    assert np.all(np.diff(got) >= 0)


@pytest.mark.parametrize("bad", [-1, 256, 3.5])
def test_spike_count_range(bad):
    with pytest.raises(ValueError):
        spike_count(bad)


def test_timing_constants():
    t = encoder.PresentationTiming()
    assert t.presentation_steps + t.silence_steps == 20
    assert t.label_step == 19 == t.cycle_steps - 1


def test_zero_and_saturated_images():
    assert not encode(np.zeros(784, dtype=np.uint8)).any()
    full = encode(np.full(784, 255, dtype=np.uint8))
    assert full.shape == (10, 784) and full.all()


def test_single_pixel_128():
    img = np.zeros(784, dtype=np.uint8)
    img[300] = 128
    s = encode(img)
    assert np.flatnonzero(s[:, 300]).tolist() == placement_oracle(5) == [1, 3, 5, 7, 9]
    assert s.sum() == 5


@pytest.mark.parametrize("n", range(11))
def test_placement_matches_oracle(n):
    assert encoder.spike_steps(n).tolist() == placement_oracle(n)


@pytest.mark.parametrize("n", range(2, 11))
def test_uniform_gaps(n):
    steps = encoder.spike_steps(n)
    gaps = np.diff(steps)
    assert np.all(np.abs(gaps - 10 / n) <= 1)


@given(st.lists(st.integers(0, 255), min_size=784, max_size=784))
def test_count_preservation_and_determinism(pixels):
    img = np.array(pixels, dtype=np.uint8)
    s = encode(img)
    np.testing.assert_array_equal(s.sum(axis=0), spike_count(img))
    np.testing.assert_array_equal(s, encode(img.copy()))


@given(st.integers(0, 255), st.integers(0, 255))
def test_monotone_in_intensity(a, b):
    lo, hi = sorted((a, b))
    assert spike_count(lo) <= spike_count(hi)


def test_eligible_inputs_are_nonzero_counts():
    img = np.zeros(784, dtype=np.uint8)
    img[[0, 1, 2]] = [12, 13, 255]  # 12 rounds to 0 spikes, 13 to 1
    np.testing.assert_array_equal(np.flatnonzero(encoder.eligible_inputs(encode(img))), [1, 2])
