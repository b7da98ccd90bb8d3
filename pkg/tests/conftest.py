import os
from pathlib import Path

import numpy as np
import pytest

from colsnn import mnist_io

REPO = Path(__file__).resolve().parents[1]


def mnist_dir():
    for candidate in (os.environ.get("COLSNN_DATA_DIR"), REPO / "data" / "mnist", "/root/data/mnist"):
        if candidate and Path(candidate, "t10k-labels-idx1-ubyte.gz").exists() or \
                candidate and Path(candidate, "t10k-labels-idx1-ubyte").exists():
            return Path(candidate)
    return None


@pytest.fixture(scope="session")
def data_dir():
    d = mnist_dir()
    if d is None:
        pytest.skip("MNIST files not available (set COLSNN_DATA_DIR)")
    return d


@pytest.fixture(scope="session")
def mnist_train(data_dir):
    return mnist_io.load_split(data_dir, "train")


@pytest.fixture(scope="session")
def mnist_test(data_dir):
    return mnist_io.load_split(data_dir, "test")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_images(rng, n, density=0.2):
    """Sparse digit-like fixtures: mostly zero with bright strokes."""
    imgs = np.zeros((n, 784), dtype=np.uint8)
    mask = rng.random((n, 784)) < density
    imgs[mask] = rng.integers(1, 256, size=mask.sum())
    return imgs


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(RESULTS):
        passed, detail = RESULTS[criterion]
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} - {detail}")
