"""Entropy-based feature relevance: discretization, symmetric uncertainty,
and removal of features that are irrelevant to the class label."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mtfs.dataset import Dataset

DEFAULT_BINS = 10


@dataclass(frozen=True)
class SUScores:
    """Symmetric uncertainty of every feature against the class label."""

    su_with_class: np.ndarray
    discretization: list[np.ndarray]  # per-feature bin edges


@dataclass(frozen=True)
class RelevanceMask:
    kept_indices: np.ndarray  # strictly increasing original feature indices
    threshold_used: float
    original_dim: int


def discretize_equal_frequency(values, n_bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Equal-frequency binning with boundaries at empirical quantiles.

    The effective bin count is capped at the number of distinct values.
    A value equal to a boundary goes to the lower bin; constant columns map
    to all-zero codes.  Returns (codes, edges).
    """
    if n_bins < 2:
        raise ValueError("need at least 2 bins")
    v = np.asarray(values, dtype=np.float64)
    k = min(int(n_bins), np.unique(v).size)
    if k <= 1:
        return np.zeros(v.shape[0], dtype=np.int64), np.empty(0)
    edges = np.quantile(v, np.arange(1, k) / k)
    # side="left": a value equal to an edge counts the edges strictly below it
    codes = np.searchsorted(edges, v, side="left").astype(np.int64)
    return codes, edges


def discretize_matrix(x: np.ndarray, n_bins: int) -> tuple[np.ndarray, list[np.ndarray]]:
    """Column-wise equal-frequency codes for a sample-major matrix."""
    n, d = x.shape
    codes = np.empty((n, d), dtype=np.int64)
    edges: list[np.ndarray] = []
    for j in range(d):
        codes[:, j], e = discretize_equal_frequency(x[:, j], n_bins)
        edges.append(e)
    return codes, edges


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def symmetric_uncertainty(x, y) -> float:
    """2*I(X;Y) / (H(X)+H(Y)) with base-2 entropies on integer codes.

    Returns 0 when both columns are constant.  Symmetric in its arguments.
    """
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("columns must be 1-D and of equal length")
    kx = int(x.max()) + 1 if x.size else 1
    ky = int(y.max()) + 1 if y.size else 1
    joint = np.bincount(x * ky + y, minlength=kx * ky).reshape(kx, ky)
    hx = _entropy(joint.sum(axis=1))
    hy = _entropy(joint.sum(axis=0))
    denom = hx + hy
    if denom == 0.0:
        return 0.0
    mi = hx + hy - _entropy(joint.ravel())
    return float(min(1.0, max(0.0, 2.0 * mi / denom)))


def su_profile(codes: np.ndarray, target: np.ndarray, k_codes: int, k_target: int) -> np.ndarray:
    """Symmetric uncertainty of every column of ``codes`` against ``target``.

    Vectorized equivalent of calling :func:`symmetric_uncertainty` per column.
    """
    n, m = codes.shape
    if m == 0:
        return np.empty(0)
    flat = (np.arange(m, dtype=np.int64) * (k_codes * k_target))[None, :] + codes * k_target + target[:, None]
    joint = np.bincount(flat.ravel(), minlength=m * k_codes * k_target).reshape(m, k_codes, k_target)
    px = joint.sum(axis=2) / n
    py = joint.sum(axis=1) / n
    pxy = joint / n

    def ent(p: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        return -terms.reshape(m, -1).sum(axis=1)

    hx = ent(px)
    hy = ent(py)
    hxy = ent(pxy)
    denom = hx + hy
    mi = np.maximum(hx + hy - hxy, 0.0)
    out = np.zeros(m)
    nz = denom > 0
    out[nz] = np.minimum(1.0, 2.0 * mi[nz] / denom[nz])
    return out


def relevance_threshold(su: np.ndarray, su_lambda: float, log_base: str = "e") -> float:
    """min(lambda * SU_max, SU of the floor(D / log D)-th ranked feature);
    ranking is by descending SU with ties to the lower feature index."""
    d = su.shape[0]
    log = {"e": math.log, "2": math.log2, "10": math.log10}[log_base]
    rank = min(d, max(1, math.floor(d / log(d))))
    order = np.lexsort((np.arange(d), -su))
    return float(min(su_lambda * su.max(), su[order[rank - 1]]))


def remove_irrelevant(
    data: Dataset,
    su_lambda: float = 0.2,
    n_bins: int = DEFAULT_BINS,
    log_base: str = "e",
) -> tuple[RelevanceMask, SUScores]:
    """Drop features whose class relevance falls at or below the adaptive
    threshold of :func:`relevance_threshold`.

    Keeping requires strictly greater SU; at least the top two features
    always survive.
    """
    d = data.n_features
    if d < 2:
        raise ValueError("need at least 2 features")
    codes, edges = discretize_matrix(data.features, n_bins)
    su = su_profile(codes, data.labels, n_bins, data.n_classes)
    rho0 = relevance_threshold(su, su_lambda, log_base)
    kept = np.flatnonzero(su > rho0)
    if kept.size < 2:
        order = np.lexsort((np.arange(d), -su))
        kept = np.sort(order[:2])
    mask = RelevanceMask(kept.astype(np.int64), rho0, d)
    return mask, SUScores(su, edges)
