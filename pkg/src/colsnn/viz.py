"""Receptive-field heatmaps and their similarity to class-mean images."""
from pathlib import Path

import numpy as np

SIDE = 28


def diverging_rgb(values, vmax):
    """Map signed values to RGB: -vmax blue, 0 white, +vmax red (linear)."""
    values = np.asarray(values, dtype=np.float64)
    if vmax <= 0:
        v = np.zeros_like(values)
    else:
        v = np.clip(values / vmax, -1.0, 1.0)
    fade_pos = np.rint(255 * (1 - np.clip(v, 0, 1)))
    fade_neg = np.rint(255 * (1 + np.clip(v, -1, 0)))
    rgb = np.empty(values.shape + (3,), dtype=np.uint8)
    rgb[..., 0] = fade_neg
    rgb[..., 1] = np.minimum(fade_pos, fade_neg)
    rgb[..., 2] = fade_pos
    return rgb


def heatmap_grid(weights, scale=4, gap=1, gap_color=(255, 255, 255)):
    """Tile ``(classes, micro, 784)`` weights into one RGB image, one row per class."""
    weights = np.asarray(weights, dtype=np.float64)
    n_rows, n_cols = weights.shape[:2]
    vmax = float(np.abs(weights).max()) if weights.size else 0.0
    cells = diverging_rgb(weights.reshape(n_rows, n_cols, SIDE, SIDE), vmax)
    cells = cells.repeat(scale, axis=2).repeat(scale, axis=3)
    cell = SIDE * scale
    h = n_rows * cell + (n_rows - 1) * gap
    w = n_cols * cell + (n_cols - 1) * gap
    img = np.empty((h, w, 3), dtype=np.uint8)
    img[:] = gap_color
    for r in range(n_rows):
        for c in range(n_cols):
            y, x = r * (cell + gap), c * (cell + gap)
            img[y:y + cell, x:x + cell] = cells[r, c]
    return img


def write_ppm(path, rgb):
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    h, w = rgb.shape[:2]
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (w, h))
        f.write(rgb.tobytes())


def read_ppm(path):
    data = Path(path).read_bytes()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    if tokens[0] != b"P6":
        raise ValueError("not a binary PPM")
    w, h, maxval = map(int, tokens[1:])
    pos += 1
    return np.frombuffer(data[pos:pos + w * h * 3], dtype=np.uint8).reshape(h, w, 3)


def render_heatmaps(net, path, scale=4, gap=1):
    """Write the 10 x 15 receptive-field grid as PPM plus a ``.txt`` layout manifest."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    img = heatmap_grid(net.weights, scale, gap)
    write_ppm(path, img)
    vmax = float(np.abs(net.weights).max())
    n_rows, n_cols = net.weights.shape[:2]
    path.with_suffix(".txt").write_text(
        f"image = {path.name}\nrows = {n_rows}  # class 0..{n_rows - 1}, top to bottom\n"
        f"cols = {n_cols}  # micro-neuron 0..{n_cols - 1}, left to right\n"
        f"cell = {SIDE * scale}x{SIDE * scale} px ({SIDE}x{SIDE} weights, scale {scale})\n"
        f"gap = {gap} px\nnormalization = global, max |w| = {vmax!r}\n"
        f"palette = blue (-max|w|) .. white (0) .. red (+max|w|)\n")
    return img


def class_means(imageset, n_classes=10):
    images = imageset.images.astype(np.float64)
    out = np.full((n_classes, images.shape[1]), np.nan)
    for c in range(n_classes):
        members = images[imageset.labels == c]
        if len(members):
            out[c] = members.mean(axis=0)
    return out


def pearson(a, b):
    """Pearson correlation; ``(0.0, True)`` when either side has zero variance."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt((a @ a) * (b @ b))
    if denom == 0:
        return 0.0, True
    return float(a @ b / denom), False


def field_similarity(net, means):
    """Correlation of each column's mean receptive field with its class-mean image.

    ``means`` is a ``(n_classes, 784)`` array (see :func:`class_means`).
    Returns ``(r, degenerate)`` arrays; degenerate marks zero-variance fields.
    """
    fields = net.weights.mean(axis=1)
    out = [pearson(f, m) for f, m in zip(fields, means)]
    return np.array([r for r, _ in out]), np.array([d for _, d in out])


def intra_column_similarity(net):
    """Mean pairwise correlation between the micro-neuron fields of each column."""
    sims = []
    for col in net.weights:
        c = np.corrcoef(col)
        iu = np.triu_indices(len(col), k=1)
        sims.append(float(np.nanmean(c[iu])))
    return np.array(sims)
