"""Reading and writing MNIST-style IDX files.

Both raw and gzip-compressed files are accepted; compression is detected
from the leading bytes rather than the file name.
"""
import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
ROWS = COLS = 28
N_PIXELS = ROWS * COLS
N_CLASSES = 10

_GZIP_MAGIC = b"\x1f\x8b"


class IdxFormatError(ValueError):
    """Bad magic number or header."""


class IdxLengthError(ValueError):
    """Payload shorter or longer than the header promises."""


class PairingError(ValueError):
    """Image and label files disagree on the item count."""


class LabelRangeError(ValueError):
    pass


def _read_bytes(path):
    raw = Path(path).read_bytes()
    if raw[:2] == _GZIP_MAGIC:
        raw = gzip.decompress(raw)
    return raw


def parse_images(raw: bytes) -> np.ndarray:
    if len(raw) < 16:
        raise IdxLengthError(f"image header truncated ({len(raw)} bytes)")
    magic, count, rows, cols = struct.unpack(">IIII", raw[:16])
    if magic != IMAGE_MAGIC:
        raise IdxFormatError(f"expected image magic 0x{IMAGE_MAGIC:08x}, got 0x{magic:08x}")
    if (rows, cols) != (ROWS, COLS):
        raise IdxFormatError(f"expected {ROWS}x{COLS} images, got {rows}x{cols}")
    expected = count * rows * cols
    payload = raw[16:]
    if len(payload) != expected:
        raise IdxLengthError(f"expected {expected} pixel bytes, got {len(payload)}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(count, N_PIXELS).copy()


def parse_labels(raw: bytes) -> np.ndarray:
    if len(raw) < 8:
        raise IdxLengthError(f"label header truncated ({len(raw)} bytes)")
    magic, count = struct.unpack(">II", raw[:8])
    if magic != LABEL_MAGIC:
        raise IdxFormatError(f"expected label magic 0x{LABEL_MAGIC:08x}, got 0x{magic:08x}")
    payload = raw[8:]
    if len(payload) != count:
        raise IdxLengthError(f"expected {count} label bytes, got {len(payload)}")
    labels = np.frombuffer(payload, dtype=np.uint8).copy()
    if labels.size and labels.max() >= N_CLASSES:
        raise LabelRangeError(f"label {int(labels.max())} outside 0..{N_CLASSES - 1}")
    return labels


def load_images(path) -> np.ndarray:
    """Return an ``(count, 784)`` uint8 array, rows in file order."""
    return parse_images(_read_bytes(path))


def load_labels(path, expected_count=None) -> np.ndarray:
    labels = parse_labels(_read_bytes(path))
    if expected_count is not None and labels.size != expected_count:
        raise PairingError(f"{labels.size} labels for {expected_count} images")
    return labels


def images_to_idx(images) -> bytes:
    images = np.asarray(images, dtype=np.uint8).reshape(-1, N_PIXELS)
    return struct.pack(">IIII", IMAGE_MAGIC, len(images), ROWS, COLS) + images.tobytes()


def labels_to_idx(labels) -> bytes:
    labels = np.asarray(labels, dtype=np.uint8).ravel()
    return struct.pack(">II", LABEL_MAGIC, labels.size) + labels.tobytes()


@dataclass(frozen=True)
class LabeledImage:
    pixels: np.ndarray
    label: int

    def __post_init__(self):
        if self.pixels.shape != (N_PIXELS,):
            raise ValueError(f"expected {N_PIXELS} pixels, got shape {self.pixels.shape}")
        if not 0 <= self.label < N_CLASSES:
            raise LabelRangeError(f"label {self.label} outside 0..{N_CLASSES - 1}")


@dataclass
class ImageSet:
    """Images as an ``(n, 784)`` uint8 array plus the matching labels."""

    images: np.ndarray
    labels: np.ndarray
    split: str = "train"

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.uint8).reshape(-1, N_PIXELS)
        self.labels = np.asarray(self.labels, dtype=np.uint8).ravel()
        if len(self.images) != len(self.labels):
            raise PairingError(f"{len(self.images)} images but {len(self.labels)} labels")
        if self.labels.size and self.labels.max() >= N_CLASSES:
            raise LabelRangeError("labels must be in 0..9")

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, i):
        if isinstance(i, slice) or isinstance(i, np.ndarray):
            return ImageSet(self.images[i], self.labels[i], self.split)
        return LabeledImage(self.images[i], int(self.labels[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def subset(self, n):
        return self[:n]

    def write(self, images_path, labels_path, compress=False):
        opener = gzip.open if compress else open
        with opener(images_path, "wb") as f:
            f.write(images_to_idx(self.images))
        with opener(labels_path, "wb") as f:
            f.write(labels_to_idx(self.labels))


_CANONICAL = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}


def load_pair(images_path, labels_path, split="train") -> ImageSet:
    images = load_images(images_path)
    labels = load_labels(labels_path, expected_count=len(images))
    return ImageSet(images, labels, split)


def find_split(data_dir, split):
    """Locate the canonical file pair for ``split`` in ``data_dir`` (``.gz`` or raw)."""
    data_dir = Path(data_dir)
    found = []
    for name in _CANONICAL[split]:
        for candidate in (data_dir / name, data_dir / (name + ".gz")):
            if candidate.exists():
                found.append(candidate)
                break
        else:
            raise FileNotFoundError(f"{name}[.gz] not found in {data_dir}")
    return tuple(found)


def load_split(data_dir, split) -> ImageSet:
    images_path, labels_path = find_split(data_dir, split)
    return load_pair(images_path, labels_path, split)
