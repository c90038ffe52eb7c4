"""Labeled tabular data: CSV ingestion, stratified folds, scaling, synthetic benchmarks."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

# applied to data scaled with statistics fitted elsewhere (e.g. test folds)
CLAMP_LO = -0.5
CLAMP_HI = 1.5


class DatasetError(ValueError):
    """Base class for dataset ingestion failures."""


class EmptyFileError(DatasetError):
    def __init__(self, path):
        super().__init__(f"no data rows in {path}")
        self.path = str(path)


class MalformedRowError(DatasetError):
    def __init__(self, row: int, expected: int, got: int):
        super().__init__(f"row {row}: expected {expected} columns, got {got}")
        self.row = row
        self.expected = expected
        self.got = got


class BadValueError(DatasetError):
    def __init__(self, row: int, column: int, value):
        super().__init__(f"row {row}, column {column}: {value!r} is not a finite number")
        self.row = row
        self.column = column
        self.value = value


class SingleClassError(DatasetError):
    def __init__(self, label):
        super().__init__(f"label column contains a single class ({label!r})")
        self.label = label


@dataclass(frozen=True)
class Dataset:
    """Immutable labeled sample matrix.

    Labels are dense integer class ids in [0, n_classes).  ``n_classes`` is
    carried explicitly so that subsets keep the full class universe even when
    a class happens to be absent from the subset.
    """

    features: np.ndarray
    labels: np.ndarray
    n_classes: int
    feature_names: tuple[str, ...] | None = None
    class_names: tuple[str, ...] | None = None

    def __post_init__(self):
        feats = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        labels = np.asarray(self.labels, dtype=np.int64)
        if feats.ndim != 2:
            raise DatasetError("features must be a 2-D matrix")
        if labels.shape != (feats.shape[0],):
            raise DatasetError("labels must be one id per sample")
        if not np.isfinite(feats).all():
            raise DatasetError("features contain non-finite values")
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_classes):
            raise DatasetError("labels outside [0, n_classes)")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray) -> "Dataset":
        """Row view as a new Dataset (class universe preserved)."""
        return Dataset(
            self.features[indices],
            self.labels[indices],
            self.n_classes,
            self.feature_names,
            self.class_names,
        )


def _validate_full(ds: Dataset) -> Dataset:
    counts = np.bincount(ds.labels, minlength=ds.n_classes)
    if (counts == 0).any():
        missing = int(np.flatnonzero(counts == 0)[0])
        raise DatasetError(f"class id {missing} never occurs")
    if ds.n_samples < 2 * ds.n_classes:
        raise DatasetError(
            f"{ds.n_samples} samples cannot be split over {ds.n_classes} classes"
        )
    return ds


def _parse_cell(token: str, row: int, col: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise BadValueError(row, col, token) from None
    if not np.isfinite(value):
        raise BadValueError(row, col, token)
    return value


def _is_numeric(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_csv(path: str | Path, label_column: str | int = "last") -> Dataset:
    """Load a comma-separated file into a Dataset.

    ``label_column`` is ``"last"``, a 0-based column index, or a header name.
    A header row is assumed iff the first row has a non-numeric cell outside
    the label column.  Textual labels are mapped to dense integer ids in
    first-appearance order.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise EmptyFileError(path)

    n_cols = len(rows[0])
    if n_cols < 2:
        raise DatasetError(f"{path}: need at least one feature column and one label column")

    if label_column == "last":
        label_idx = n_cols - 1
    elif isinstance(label_column, int) or (isinstance(label_column, str) and label_column.lstrip("-").isdigit()):
        label_idx = int(label_column)
        if label_idx < 0:
            label_idx += n_cols
        if not 0 <= label_idx < n_cols:
            raise DatasetError(f"label column index {label_column} out of range")
    else:
        header_row = rows[0]
        if label_column not in header_row:
            raise DatasetError(f"label column {label_column!r} not found in header")
        label_idx = header_row.index(label_column)

    first = rows[0]
    has_header = any(
        not _is_numeric(cell.strip()) for j, cell in enumerate(first) if j != label_idx
    )
    feature_names: tuple[str, ...] | None = None
    if has_header:
        feature_names = tuple(c.strip() for j, c in enumerate(first) if j != label_idx)
        data_rows = rows[1:]
        row_offset = 1
    else:
        data_rows = rows
        row_offset = 0
    if not data_rows:
        raise EmptyFileError(path)

    n_samples = len(data_rows)
    features = np.empty((n_samples, n_cols - 1), dtype=np.float64)
    label_ids: dict[str, int] = {}
    labels = np.empty(n_samples, dtype=np.int64)
    for i, row in enumerate(data_rows):
        row_no = i + row_offset
        if len(row) != n_cols:
            raise MalformedRowError(row_no, n_cols, len(row))
        k = 0
        for j, cell in enumerate(row):
            token = cell.strip()
            if j == label_idx:
                labels[i] = label_ids.setdefault(token, len(label_ids))
            else:
                features[i, k] = _parse_cell(token, row_no, j)
                k += 1

    if len(label_ids) < 2:
        raise SingleClassError(next(iter(label_ids)))

    ds = Dataset(
        features,
        labels,
        n_classes=len(label_ids),
        feature_names=feature_names,
        class_names=tuple(label_ids),
    )
    return _validate_full(ds)


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of every sample to exactly one fold."""

    fold_assignment: np.ndarray
    n_folds: int
    kind: str = "inner_fitness"  # or "outer_test"

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_assignment == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_assignment != fold)


def stratified_folds(data: Dataset, k: int, seed, kind: str = "inner_fitness") -> FoldPlan:
    """Stratified k-fold plan: per fold each class count is within one of its
    exact proportional share.

    Classes with fewer than k samples are dealt round-robin (with a rotating
    start) so no fold systematically misses them.  Deterministic for a fixed
    seed.
    """
    if k < 2:
        raise ValueError("need at least 2 folds")
    n = data.n_samples
    if k > n:
        raise ValueError(f"k={k} exceeds the {n} available samples")
    rng = np.random.default_rng(seed)
    assignment = np.full(n, -1, dtype=np.int64)
    start = 0
    for c in range(data.n_classes):
        idx = np.flatnonzero(data.labels == c)
        rng.shuffle(idx)
        for j, s in enumerate(idx):
            assignment[s] = (start + j) % k
        start = (start + len(idx)) % k
    return FoldPlan(assignment, k, kind)


def minmax_scale_fit_apply(
    train: np.ndarray, others: Sequence[np.ndarray] = ()
) -> tuple[np.ndarray, list[np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Fit per-feature min/max on ``train``, map it onto [0, 1], and apply the
    same affine map to ``others`` clamped to [-0.5, 1.5].

    Constant training features map everything to 0.
    """
    if train.size == 0:
        raise ValueError("empty training matrix")
    mins = train.min(axis=0)
    maxs = train.max(axis=0)
    span = maxs - mins
    varying = span > 0
    safe_span = np.where(varying, span, 1.0)
    train_scaled = np.where(varying, (train - mins) / safe_span, 0.0)
    others_scaled = [
        np.clip(np.where(varying, (x - mins) / safe_span, 0.0), CLAMP_LO, CLAMP_HI)
        for x in others
    ]
    return train_scaled, others_scaled, (mins, maxs)


def generate_synthetic(
    n_samples: int,
    n_features: int,
    n_informative: int,
    n_classes: int,
    class_shift: float,
    seed,
) -> tuple[Dataset, np.ndarray]:
    """Gaussian benchmark with planted informative features.

    Informative columns get per-class means spaced ``class_shift`` apart; the
    remaining columns are label-independent standard normal noise.  Returns
    the dataset together with the (sorted) planted column indices.
    Bit-reproducible for a fixed seed.
    """
    if not 0 <= n_informative <= n_features:
        raise ValueError("n_informative must be in [0, n_features]")
    if class_shift < 0:
        raise ValueError("class_shift must be non-negative")
    if n_classes < 2:
        raise ValueError("need at least 2 classes")
    if n_samples < 2 * n_classes:
        raise ValueError("need at least 2 samples per class")
    rng = np.random.default_rng(seed)
    labels = np.arange(n_samples, dtype=np.int64) % n_classes
    features = rng.standard_normal((n_samples, n_features))
    informative = np.sort(rng.choice(n_features, size=n_informative, replace=False))
    features[:, informative] += labels[:, None] * class_shift
    ds = Dataset(features, labels, n_classes=n_classes)
    return _validate_full(ds), informative.astype(np.int64)
