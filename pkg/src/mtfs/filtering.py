"""Filter-style feature importance (ReliefF, chi-square) and the knee-point
cutoff that turns a ranking into a binary task mask."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mtfs.relevance import discretize_matrix


@dataclass(frozen=True)
class FeatureScores:
    method: str  # "relieff" or "chi_square"
    scores: np.ndarray
    ranking: np.ndarray  # feature indices sorted by score desc, ties by lower index


@dataclass(frozen=True)
class TaskMask:
    selected: np.ndarray  # boolean per feature
    dim: int
    source_method: str


def _ranking(scores: np.ndarray) -> np.ndarray:
    return np.lexsort((np.arange(scores.size), -scores))


def relieff_scores(
    x: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    n_neighbors: int = 10,
) -> FeatureScores:
    """Deterministic ReliefF weights over all samples.

    For every sample the n_neighbors nearest same-class hits and, per other
    class, the n_neighbors nearest misses (Manhattan distance, ties by lower
    sample index) shift each feature's weight by the prior-weighted mean
    coordinate difference.  Features are assumed pre-scaled to [0, 1].
    The neighbor count is clipped to the smallest class size minus one;
    samples of singleton classes contribute no hit term.
    """
    m, d = x.shape
    counts = np.bincount(y, minlength=n_classes)
    present = np.flatnonzero(counts > 0)
    priors = counts / m
    smallest = counts[present].min()
    k = max(1, min(n_neighbors, smallest - 1)) if smallest > 1 else 1

    by_class = {c: np.flatnonzero(y == c) for c in present}
    w = np.zeros(d)
    scale = 1.0 / (m * k)
    for i in range(m):
        dists = np.abs(x - x[i]).sum(axis=1)
        ci = y[i]
        if priors[ci] == 1.0:
            continue
        for c in present:
            pool = by_class[c]
            if c == ci:
                pool = pool[pool != i]
                if pool.size == 0:
                    continue  # singleton class: no hit term
                take = min(k, pool.size)
                nearest = pool[np.lexsort((pool, dists[pool]))[:take]]
                w -= np.abs(x[nearest] - x[i]).sum(axis=0) * scale
            else:
                take = min(k, pool.size)
                nearest = pool[np.lexsort((pool, dists[pool]))[:take]]
                factor = priors[c] / (1.0 - priors[ci])
                w += factor * np.abs(x[nearest] - x[i]).sum(axis=0) * scale
    return FeatureScores("relieff", w, _ranking(w))


def chi_square_scores(
    x: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    n_bins: int = 10,
) -> FeatureScores:
    """Chi-square statistic of each discretized feature against the labels.

    Cells with zero expected count are skipped."""
    n, d = x.shape
    codes, _ = discretize_matrix(x, n_bins)
    k = int(codes.max()) + 1 if codes.size else 1
    flat = (np.arange(d, dtype=np.int64) * (k * n_classes))[None, :] + codes * n_classes + y[:, None]
    observed = np.bincount(flat.ravel(), minlength=d * k * n_classes).reshape(d, k, n_classes)
    rows = observed.sum(axis=2, keepdims=True)
    cols = observed.sum(axis=1, keepdims=True)
    expected = rows * cols / n
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(expected > 0, (observed - expected) ** 2 / np.where(expected > 0, expected, 1.0), 0.0)
    scores = terms.reshape(d, -1).sum(axis=1)
    return FeatureScores("chi_square", scores, _ranking(scores))


def knee_point_mask(scores: FeatureScores) -> TaskMask:
    """Select every feature ranked at or above the knee of the score curve.

    The knee is the point with the largest perpendicular distance to the line
    joining the best- and worst-ranked scores; distance ties go to the lower
    rank.  An all-equal profile falls back to the top half (rounded up).
    """
    ranked = scores.scores[scores.ranking]
    d = ranked.size
    if d < 2:
        raise ValueError("need at least 2 features")
    if np.all(ranked == ranked[0]):
        knee_rank = (d + 1) // 2
    else:
        ranks = np.arange(1, d + 1, dtype=np.float64)
        dx = float(d - 1)
        dy = float(ranked[-1] - ranked[0])
        cross = dx * (ranked - ranked[0]) - dy * (ranks - 1.0)
        dist = np.abs(cross) / np.hypot(dx, dy)
        knee_rank = int(np.argmax(dist)) + 1  # first max -> lowest rank on ties
    selected = np.zeros(d, dtype=bool)
    selected[scores.ranking[:knee_rank]] = True
    return TaskMask(selected, knee_rank, scores.method)
