"""Dataset ingestion: MNIST IDX files and a synthetic two-cluster generator."""

from __future__ import annotations

import struct

import numpy as np

from .errors import BadMagic, DataError, DigitAbsent, TruncatedFile

IMAGES_MAGIC = 2051
LABELS_MAGIC = 2049


def _read_exact(fh, count, what):
    data = fh.read(count)
    if len(data) != count:
        raise TruncatedFile(f"{what}: expected {count} bytes, got {len(data)}")
    return data


def _read_header(fh, magic_expected, n_dims, path):
    (magic,) = struct.unpack(">I", _read_exact(fh, 4, f"{path} magic"))
    if magic != magic_expected:
        raise BadMagic(magic)
    dims = _read_exact(fh, 4 * n_dims, f"{path} header")
    return struct.unpack(f">{n_dims}I", dims)


def load_mnist_idx(images_path, labels_path, digit_a, digit_b, max_n):
    """Two-digit binary subset of an MNIST IDX image/label pair.

    Big-endian IDX layout: images carry magic 2051 and dims (count, rows,
    cols) followed by unsigned pixel bytes; labels carry magic 2049 and a
    count followed by label bytes. Keeps images of digit_a (mapped to +1)
    and digit_b (mapped to -1) in file order, truncated to max_n rows, with
    pixels scaled to [0, 1].
    """
    for digit in (digit_a, digit_b):
        if not 0 <= digit <= 9:
            raise DataError(f"digit out of range: {digit}")
    if digit_a == digit_b:
        raise DataError("digits must be distinct")
    if max_n < 1:
        raise DataError(f"max_n must be at least 1, got {max_n}")

    with open(images_path, "rb") as fh:
        count, rows, cols = _read_header(fh, IMAGES_MAGIC, 3, images_path)
        pixels = _read_exact(fh, count * rows * cols, f"{images_path} pixels")
    images = np.frombuffer(pixels, dtype=np.uint8).reshape(count, rows * cols)

    with open(labels_path, "rb") as fh:
        (label_count,) = _read_header(fh, LABELS_MAGIC, 1, labels_path)
        label_bytes = _read_exact(fh, label_count, f"{labels_path} labels")
    labels = np.frombuffer(label_bytes, dtype=np.uint8)

    if label_count != count:
        raise DataError(f"image count {count} does not match label count {label_count}")
    for digit in (digit_a, digit_b):
        if not np.any(labels == digit):
            raise DigitAbsent(digit)

    keep = (labels == digit_a) | (labels == digit_b)
    picked = images[keep][:max_n]
    picked_labels = labels[keep][:max_n]
    x = picked.astype(np.float64) / 255.0
    y = np.where(picked_labels == digit_a, 1, -1)
    return x, y


def gen_synthetic(n, d, seed, separation):
    """Two seeded Gaussian clusters centred at +-(separation/2) e_1.

    Labels are balanced (+1 gets the extra point when n is odd) and the
    output is deterministic for a fixed seed.
    """
    if n < 2:
        raise DataError(f"n must be at least 2, got {n}")
    if d < 1:
        raise DataError(f"d must be at least 1, got {d}")
    rng = np.random.default_rng(seed)
    n_pos = (n + 1) // 2
    x = rng.standard_normal((n, d))
    x[:n_pos, 0] += separation / 2.0
    x[n_pos:, 0] -= separation / 2.0
    y = np.concatenate([np.ones(n_pos, dtype=np.int64), -np.ones(n - n_pos, dtype=np.int64)])
    return x, y
