"""Correlation-based feature clustering and the weight-vector mapping that
lets a low-dimensional cluster-weight solution stand in for a full one."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mtfs.relevance import discretize_matrix, su_profile

EPS = 1e-6
WEIGHT_MAX = 2.0


@dataclass(frozen=True)
class ClusterMap:
    cluster_of: np.ndarray  # cluster id per feature
    n_clusters: int
    centers: np.ndarray  # one representative feature index per cluster


def correlation_cluster(x: np.ndarray, su_with_class: np.ndarray, n_bins: int = 10) -> ClusterMap:
    """Greedy clustering of correlated features.

    Features are visited in descending class relevance (ties by lower index);
    the first unassigned feature seeds a cluster, then absorbs every later
    unassigned feature whose redundancy with the center is at least its own
    class relevance: SU(g, center) >= SU(g, class).
    """
    n, d = x.shape
    if d < 1:
        raise ValueError("need at least 1 feature")
    codes, _ = discretize_matrix(x, n_bins)
    k = int(codes.max()) + 1 if codes.size else 1
    order = np.lexsort((np.arange(d), -su_with_class))
    cluster_of = np.full(d, -1, dtype=np.int64)
    centers: list[int] = []
    for f in order:
        if cluster_of[f] >= 0:
            continue
        cid = len(centers)
        centers.append(int(f))
        cluster_of[f] = cid
        remaining = order[cluster_of[order] < 0]
        if remaining.size:
            su_fh = su_profile(codes[:, remaining], codes[:, f], k, k)
            joins = remaining[su_fh >= su_with_class[remaining]]
            cluster_of[joins] = cid
    return ClusterMap(cluster_of, len(centers), np.asarray(centers, dtype=np.int64))


def wo_reduce(v: np.ndarray, prime: np.ndarray, cm: ClusterMap, eps: float = EPS) -> np.ndarray:
    """Weight vector for ``v`` relative to the reference solution ``prime``:
    per cluster, the mean of v_i / max(prime_i, eps), clamped to [0, 2]."""
    ratios = np.asarray(v, dtype=np.float64) / np.maximum(prime, eps)
    sums = np.bincount(cm.cluster_of, weights=ratios, minlength=cm.n_clusters)
    counts = np.bincount(cm.cluster_of, minlength=cm.n_clusters)
    return np.clip(sums / counts, 0.0, WEIGHT_MAX)


def wo_expand(u: np.ndarray, prime: np.ndarray, cm: ClusterMap) -> np.ndarray:
    """Full-dimensional solution u_cluster(i) * prime_i, clamped to [0, 1]."""
    return np.clip(np.asarray(u, dtype=np.float64)[cm.cluster_of] * prime, 0.0, 1.0)


def select_prime(elites) -> np.ndarray:
    """Reference solution: the elite with the lowest balanced error across all
    archives, ties broken by fewer selected features, then earlier task index.
    Exact zeros are lifted to eps so the weight mapping stays informative."""
    if not elites:
        raise ValueError("no evaluated elites to select a reference from")
    best = min(
        range(len(elites)),
        key=lambda i: (
            elites[i].objectives.error_rate,
            elites[i].objectives.feature_rate,
            elites[i].task_id,
            i,
        ),
    )
    prime = elites[best].full_repr.copy()
    prime[prime == 0.0] = EPS
    return prime
