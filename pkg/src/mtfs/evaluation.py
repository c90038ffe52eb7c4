"""Wrapper evaluation: threshold decoding, KNN scoring under internal
cross-validation, and the three objective values."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from mtfs import kernels
from mtfs.dataset import FoldPlan


class ObjectiveVector(NamedTuple):
    error_rate: float
    feature_rate: float
    assistant_error: float


# empty selections: worst possible accuracy objectives, honest zero size
SENTINEL = ObjectiveVector(1.0, 0.0, 1.0)


@dataclass(eq=False)
class Individual:
    """One candidate solution of one task.

    ``task_repr`` lives in the owning task's search space; ``full_repr`` is
    the reconstructed full-dimensional solution.  ``objectives`` is None
    while the individual awaits evaluation.
    """

    task_repr: np.ndarray
    velocity: np.ndarray
    full_repr: np.ndarray | None
    task_id: int
    objectives: ObjectiveVector | None = None
    selection_key: bytes | None = None


def decode_selection(v: np.ndarray, theta: float) -> np.ndarray:
    """Feature i is selected iff v_i > theta (strict)."""
    return np.asarray(v) > theta


def balanced_error(y_true, y_pred, n_classes: int) -> float:
    """One minus the mean per-class recall.

    Classes absent from ``y_true`` are excluded from the mean (small folds
    may miss a class)."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    recalls = []
    for c in range(n_classes):
        mask = y_true == c
        if not mask.any():
            continue
        recalls.append(float((y_pred[mask] == c).mean()))
    return 1.0 - float(np.mean(recalls))


def assistant_error(y_true, y_pred, n_classes: int) -> float:
    """One minus the mean per-class precision over classes present in
    ``y_true``; a class never predicted contributes zero precision."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    precisions = []
    for c in range(n_classes):
        if not (y_true == c).any():
            continue
        predicted = y_pred == c
        if not predicted.any():
            precisions.append(0.0)
        else:
            precisions.append(float((y_true[predicted] == c).mean()))
    return 1.0 - float(np.mean(precisions))


def knn_predict(train_x, train_y, query_x, k: int, n_classes: int) -> np.ndarray:
    """KNN prediction through the selected kernel backend."""
    return kernels.knn_predict(train_x, train_y, query_x, k, n_classes)


class SubsetEvaluator:
    """Scores full-dimensional solutions against a fixed training split.

    The inner fold plan is fixed at construction so fitness is a pure
    function of the selected-feature bit pattern; results are memoized on
    that pattern.
    """

    def __init__(
        self,
        features: np.ndarray,
        labels: np.ndarray,
        folds: FoldPlan,
        n_classes: int,
        k: int = 5,
        theta: float = 0.6,
    ):
        self.features = np.ascontiguousarray(features, dtype=np.float64)
        self.labels = np.ascontiguousarray(labels, dtype=np.int64)
        self.folds = folds
        self.n_classes = n_classes
        self.k = k
        self.theta = theta
        self.n_kept = self.features.shape[1]
        self._memo: dict[bytes, tuple[float, float]] = {}

    def evaluate(self, full_v: np.ndarray) -> tuple[ObjectiveVector, bytes]:
        selection = decode_selection(full_v, self.theta)
        key = np.packbits(selection).tobytes()
        n_selected = int(selection.sum())
        if n_selected == 0:
            return SENTINEL, key
        cached = self._memo.get(key)
        if cached is None:
            sub = np.ascontiguousarray(self.features[:, selection])
            cached = kernels.knn_cv_errors(
                sub,
                self.labels,
                self.folds.fold_assignment,
                self.folds.n_folds,
                self.k,
                self.n_classes,
            )
            self._memo[key] = cached
        err, assist = cached
        return ObjectiveVector(err, n_selected / self.n_kept, assist), key

    def evaluate_individual(self, ind: Individual) -> None:
        ind.objectives, ind.selection_key = self.evaluate(ind.full_repr)
