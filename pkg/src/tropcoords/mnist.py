"""Digit-image experiment: IDX ingestion, the 56-column featurization
(4 sweep directions x 2 homology dimensions x 7 features), min-max
scaling, a small k-NN classifier, and k-fold cross-validation.

The pipeline per image: threshold at intensity > t, build the four sweep
filtrations, reduce each to (h0, h1), and evaluate the seven per-barcode
features on each of the eight barcodes.  Columns are sweep-major in the
fixed order TopDown, BottomUp, LeftRight, RightLeft, h0 before h1, then
feature index 1..7.  Everything is deterministic: a fixed seed yields a
bit-identical feature matrix and accuracy regardless of worker count.
"""

from __future__ import annotations

import json
import struct
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coords import (
    FeatureColumn,
    FeatureMatrix,
    OrbitSpec,
    Sigma,
    SumLengths,
    SumMaxGap,
    SumMinXmd,
    mnist_features,
    spec_to_text,
)
from .persistence import GrayImage, SweepDirection, sweep_barcodes, threshold


class IdxFormatError(ValueError):
    pass


class DatasetError(ValueError):
    pass


IMAGE_MAGIC = 2051
LABEL_MAGIC = 2049

SWEEP_ORDER = (
    SweepDirection.TopDown,
    SweepDirection.BottomUp,
    SweepDirection.LeftRight,
    SweepDirection.RightLeft,
)


@dataclass(frozen=True)
class LabeledDataset:
    images: tuple[GrayImage, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise DatasetError(
                f"{len(self.images)} images but {len(self.labels)} labels"
            )
        for img in self.images:
            if (img.rows, img.cols) != (28, 28):
                raise DatasetError(f"expected 28x28 images, got {img.rows}x{img.cols}")
        for y in self.labels:
            if not 0 <= y <= 9:
                raise DatasetError(f"label {y} outside 0..9")

    def __len__(self) -> int:
        return len(self.images)

    def head(self, n: int) -> "LabeledDataset":
        return LabeledDataset(self.images[:n], self.labels[:n])


# ---------------------------------------------------------------------------
# IDX container format: big-endian magic + counts, then unsigned bytes


def read_idx_images(path) -> list[GrayImage]:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 16:
        raise IdxFormatError("truncated IDX image header")
    magic, count, rows, cols = struct.unpack(">iiii", data[:16])
    if magic != IMAGE_MAGIC:
        raise IdxFormatError(f"bad IDX image magic {magic}, expected {IMAGE_MAGIC}")
    payload = data[16:]
    if len(payload) != count * rows * cols:
        raise IdxFormatError(
            f"IDX payload holds {len(payload)} bytes, expected {count * rows * cols}"
        )
    span = rows * cols
    return [
        GrayImage(rows, cols, payload[i * span : (i + 1) * span]) for i in range(count)
    ]


def read_idx_labels(path) -> list[int]:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 8:
        raise IdxFormatError("truncated IDX label header")
    magic, count = struct.unpack(">ii", data[:8])
    if magic != LABEL_MAGIC:
        raise IdxFormatError(f"bad IDX label magic {magic}, expected {LABEL_MAGIC}")
    payload = data[8:]
    if len(payload) != count:
        raise IdxFormatError(f"IDX payload holds {len(payload)} labels, expected {count}")
    labels = list(payload)
    for y in labels:
        if y > 9:
            raise IdxFormatError(f"label {y} outside 0..9")
    return labels


def write_idx_images(path, images: Sequence[GrayImage]) -> None:
    if not images:
        raise IdxFormatError("refusing to write an empty IDX image file")
    rows, cols = images[0].rows, images[0].cols
    with open(path, "wb") as fh:
        fh.write(struct.pack(">iiii", IMAGE_MAGIC, len(images), rows, cols))
        for img in images:
            if (img.rows, img.cols) != (rows, cols):
                raise IdxFormatError("all images in one IDX file must share a shape")
            fh.write(img.pixels)


def write_idx_labels(path, labels: Sequence[int]) -> None:
    for y in labels:
        if not 0 <= y <= 9:
            raise IdxFormatError(f"label {y} outside 0..9")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">ii", LABEL_MAGIC, len(labels)))
        fh.write(bytes(labels))


def load_dataset(images_path, labels_path, count: int | None = None) -> LabeledDataset:
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if len(images) != len(labels):
        raise DatasetError(f"{len(images)} images but {len(labels)} labels")
    if count is not None:
        images, labels = images[:count], labels[:count]
    return LabeledDataset(tuple(images), tuple(labels))


# ---------------------------------------------------------------------------
# featurization


def feature_columns(m: int = 28) -> tuple[FeatureColumn, ...]:
    per_barcode = (
        Sigma(OrbitSpec(0, 1, 0)),
        Sigma(OrbitSpec(0, 2, 0)),
        Sigma(OrbitSpec(0, 3, 0)),
        Sigma(OrbitSpec(0, 4, 0)),
        SumLengths(),
        SumMinXmd(m),
        SumMaxGap(m),
    )
    cols = []
    for sweep in SWEEP_ORDER:
        for dim in (0, 1):
            for spec in per_barcode:
                cols.append(FeatureColumn(spec, f"{sweep.name}/h{dim}"))
    return tuple(cols)


def image_features(img: GrayImage, m: int = 28, t: int = 100) -> list[float]:
    """The 56 features of one image, sweep-major, h0 before h1."""
    binary = threshold(img, t)
    row: list[float] = []
    for sweep in SWEEP_ORDER:
        h0, h1 = sweep_barcodes(binary, sweep)
        row.extend(mnist_features(h0, m))
        row.extend(mnist_features(h1, m))
    return row


def _image_features_packed(args) -> list[float]:
    rows, cols, pixels, m, t = args
    return image_features(GrayImage(rows, cols, pixels), m, t)


def featurize_dataset(
    ds: LabeledDataset, m: int = 28, t: int = 100, workers: int = 1
) -> FeatureMatrix:
    if workers <= 1 or len(ds) < 2:
        values = [image_features(img, m, t) for img in ds.images]
    else:
        packed = [(img.rows, img.cols, img.pixels, m, t) for img in ds.images]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_image_features_packed, packed, chunksize=16))
    array = np.array(values, dtype=float).reshape(len(ds), 56)
    return FeatureMatrix(feature_columns(m), array)


def feature_metadata(matrix: FeatureMatrix, m: int, t: int) -> dict:
    return {
        "rows": matrix.rows,
        "columns": [
            {"index": i, "source": col.source, "spec": spec_to_text(col.spec)}
            for i, col in enumerate(matrix.columns)
        ],
        "m": m,
        "threshold": t,
        "frame": "28x28",
        "conventions": {
            "sweep_values": "0-based row/column indices, reversed for BottomUp/RightLeft",
            "essential_death": "sweep extent (row count for vertical sweeps, column count for horizontal), one past the max vertex value",
            "triangles": "8-adjacency; full 2x2 blocks carry three of their four triangles (the dependent one is omitted)",
        },
    }


def save_features(path, matrix: FeatureMatrix) -> None:
    np.savetxt(path, matrix.values, fmt="%.12g", delimiter=",")


def load_features(path) -> np.ndarray:
    try:
        values = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise DatasetError(f"bad feature table: {exc}") from exc
    return values


# ---------------------------------------------------------------------------
# scaling


@dataclass(frozen=True)
class Scaler:
    mins: np.ndarray
    maxs: np.ndarray


def fit_scaler(train: np.ndarray | FeatureMatrix) -> Scaler:
    x = train.values if isinstance(train, FeatureMatrix) else np.asarray(train, dtype=float)
    if x.size == 0:
        raise DatasetError("cannot fit a scaler on an empty matrix")
    return Scaler(x.min(axis=0), x.max(axis=0))


def apply_scaler(s: Scaler, x: np.ndarray | FeatureMatrix) -> np.ndarray:
    v = x.values if isinstance(x, FeatureMatrix) else np.asarray(x, dtype=float)
    span = s.maxs - s.mins
    safe = np.where(span == 0.0, 1.0, span)
    scaled = (v - s.mins) / safe
    scaled = np.where(span == 0.0, 0.0, scaled)  # constant columns pin to 0
    return np.clip(scaled, 0.0, 1.0)


# ---------------------------------------------------------------------------
# k-NN and cross-validation


def knn_classify(
    train_x: np.ndarray, train_y: Sequence[int], test_x: np.ndarray, k: int
) -> np.ndarray:
    train_x = np.asarray(train_x, dtype=float)
    test_x = np.asarray(test_x, dtype=float)
    train_y = np.asarray(train_y)
    if k < 1:
        raise DatasetError(f"k={k} must be >= 1")
    if train_x.shape[0] == 0:
        raise DatasetError("empty training set")
    if k > train_x.shape[0]:
        raise DatasetError(f"k={k} exceeds training size {train_x.shape[0]}")
    if test_x.size and test_x.shape[1] != train_x.shape[1]:
        raise DatasetError(
            f"test has {test_x.shape[1]} columns, train has {train_x.shape[1]}"
        )
    preds = []
    for row in test_x:
        d = np.sqrt(((train_x - row) ** 2).sum(axis=1))
        nearest = np.argsort(d, kind="stable")[:k]
        votes = Counter(train_y[nearest].tolist())
        top = max(votes.values())
        tied = [label for label, c in votes.items() if c == top]
        if len(tied) > 1:
            mean_dist = {
                label: d[nearest][train_y[nearest] == label].mean() for label in tied
            }
            tied.sort(key=lambda label: (mean_dist[label], label))
        preds.append(tied[0])
    return np.asarray(preds)


def cross_validate_scores(
    x: np.ndarray | FeatureMatrix,
    y: Sequence[int],
    folds: int,
    k: int = 5,
    seed: int = 42,
) -> list[float]:
    """Per-fold accuracies; the scaler is fit on each training fold only."""
    v = x.values if isinstance(x, FeatureMatrix) else np.asarray(x, dtype=float)
    y = np.asarray(y)
    n = v.shape[0]
    if folds < 2:
        raise DatasetError(f"folds={folds} must be >= 2")
    if folds > n:
        raise DatasetError(f"folds={folds} exceeds sample count {n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    parts = np.array_split(perm, folds)
    scores = []
    for i, test_idx in enumerate(parts):
        train_idx = np.concatenate([p for j, p in enumerate(parts) if j != i])
        scaler = fit_scaler(v[train_idx])
        pred = knn_classify(
            apply_scaler(scaler, v[train_idx]),
            y[train_idx],
            apply_scaler(scaler, v[test_idx]),
            k,
        )
        scores.append(float((pred == y[test_idx]).mean()))
    return scores


def cross_validate(
    x: np.ndarray | FeatureMatrix,
    y: Sequence[int],
    folds: int,
    k: int = 5,
    seed: int = 42,
) -> float:
    """Mean accuracy over folds."""
    return float(np.mean(cross_validate_scores(x, y, folds, k, seed)))
