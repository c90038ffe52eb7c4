"""Pure-NumPy nearest-neighbour scoring kernels.

Fallback used when the compiled extension is unavailable; the compiled
kernel in _knn_kernel.pyx implements the same contract.
"""

from __future__ import annotations

import numpy as np


def knn_predict(train_x, train_y, query_x, k: int, n_classes: int) -> np.ndarray:
    """Majority vote over the k nearest training samples.

    Squared Euclidean distance; distance ties go to the lower train index,
    vote ties to the smallest class id.  k is capped at the train size.
    """
    train_x = np.asarray(train_x, dtype=np.float64)
    query_x = np.asarray(query_x, dtype=np.float64)
    train_y = np.asarray(train_y, dtype=np.int64)
    k = min(int(k), train_x.shape[0])
    out = np.empty(query_x.shape[0], dtype=np.int64)
    for i in range(query_x.shape[0]):
        d = ((train_x - query_x[i]) ** 2).sum(axis=1)
        nearest = np.argsort(d, kind="stable")[:k]
        votes = np.bincount(train_y[nearest], minlength=n_classes)
        out[i] = votes.argmax()
    return out


def _fold_errors(y_true: np.ndarray, y_pred: np.ndarray, n_classes: int) -> tuple[float, float]:
    conf = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(conf, (y_true, y_pred), 1)
    truth_counts = conf.sum(axis=1)
    pred_counts = conf.sum(axis=0)
    present = truth_counts > 0
    diag = np.diagonal(conf)
    recalls = diag[present] / truth_counts[present]
    with np.errstate(divide="ignore", invalid="ignore"):
        precisions = np.where(pred_counts > 0, diag / np.where(pred_counts > 0, pred_counts, 1), 0.0)
    return 1.0 - float(recalls.mean()), 1.0 - float(precisions[present].mean())


def knn_cv_errors(x, y, fold_of, n_folds: int, k: int, n_classes: int) -> tuple[float, float]:
    """Cross-validated (balanced error, precision-based error) of a KNN
    classifier, averaged over folds.

    Per fold, classes absent from the held-out truth are excluded from both
    class means; a class never predicted contributes zero precision.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    fold_of = np.asarray(fold_of, dtype=np.int64)
    err_sum = 0.0
    assist_sum = 0.0
    for f in range(n_folds):
        test = fold_of == f
        train = ~test
        pred = knn_predict(x[train], y[train], x[test], k, n_classes)
        err, assist = _fold_errors(y[test], pred, n_classes)
        err_sum += err
        assist_sum += assist
    return err_sum / n_folds, assist_sum / n_folds
