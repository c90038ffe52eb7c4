"""Multi-objective search kernel shared by all tasks: non-dominated sorting,
task-specific comparison, the competitive-swarm update, polynomial mutation,
environmental selection, and the accuracy-biased elite archive."""

from __future__ import annotations

import numpy as np

from mtfs.evaluation import Individual, ObjectiveVector

# comparison / selection modes
ORIGINAL = "original"  # (error rate, feature rate)
AUXILIARY = "auxiliary"  # accuracy pair (error rate, assistant error)
ERROR_ONLY = "error_only"  # scalar error rate


def nd_sort(objs) -> np.ndarray:
    """Pareto front index per row (0 = non-dominated), minimizing all
    objectives.  Equal vectors share a front."""
    objs = np.asarray(objs, dtype=np.float64)
    n = objs.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    le = (objs[:, None, :] <= objs[None, :, :]).all(axis=2)
    lt = (objs[:, None, :] < objs[None, :, :]).any(axis=2)
    dominates = le & lt
    n_dominators = dominates.sum(axis=0).astype(np.int64)
    fronts = np.full(n, -1, dtype=np.int64)
    current = np.flatnonzero(n_dominators == 0)
    level = 0
    while current.size:
        fronts[current] = level
        n_dominators[current] = -1
        n_dominators -= dominates[current].sum(axis=0)
        current = np.flatnonzero(n_dominators == 0)
        level += 1
    return fronts


def _pair(obj: ObjectiveVector, mode: str) -> tuple[float, float]:
    if mode == AUXILIARY:
        return (obj.error_rate, obj.assistant_error)
    return (obj.error_rate, obj.feature_rate)


def _dominates2(a: tuple[float, float], b: tuple[float, float]) -> bool:
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


def compare(a: ObjectiveVector, b: ObjectiveVector, mode: str) -> bool:
    """True when ``a`` wins the pairwise competition under ``mode``.

    original: Pareto dominance on (error, feature rate), then lower error,
    then lower feature rate, then ``a``.  auxiliary: lower error, then lower
    assistant error, then lower feature rate, then ``a``.  error_only: lower
    error, then ``a``.
    """
    if mode == ORIGINAL:
        pa, pb = _pair(a, ORIGINAL), _pair(b, ORIGINAL)
        if _dominates2(pa, pb):
            return True
        if _dominates2(pb, pa):
            return False
        return (a.error_rate, a.feature_rate) <= (b.error_rate, b.feature_rate)
    if mode == AUXILIARY:
        return (a.error_rate, a.assistant_error, a.feature_rate) <= (
            b.error_rate,
            b.assistant_error,
            b.feature_rate,
        )
    if mode == ERROR_ONLY:
        return a.error_rate <= b.error_rate
    raise ValueError(f"unknown mode {mode!r}")


def crowding_distance(objs: np.ndarray) -> np.ndarray:
    """Standard crowding distance; boundary points get +inf.  Objectives with
    zero spread contribute nothing."""
    objs = np.asarray(objs, dtype=np.float64)
    n, m = objs.shape
    dist = np.zeros(n)
    if n <= 2:
        return np.full(n, np.inf)
    for j in range(m):
        order = np.argsort(objs[:, j], kind="stable")
        span = objs[order[-1], j] - objs[order[0], j]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        if span > 0:
            gaps = (objs[order[2:], j] - objs[order[:-2], j]) / span
            dist[order[1:-1]] += gaps
    return dist


def environmental_selection(pool: list[Individual], mode: str, n: int) -> list[Individual]:
    """Reduce ``pool`` to ``n`` members by front rank on the mode's objective
    pair, splitting the boundary front by crowding distance (ties by lower
    error, then pool order)."""
    if len(pool) <= n:
        return list(pool)
    if mode == ERROR_ONLY:
        order = sorted(
            range(len(pool)),
            key=lambda i: (pool[i].objectives.error_rate, pool[i].objectives.feature_rate, i),
        )
        return [pool[i] for i in order[:n]]
    objs = np.array([_pair(ind.objectives, mode) for ind in pool])
    fronts = nd_sort(objs)
    chosen: list[int] = []
    for level in range(int(fronts.max()) + 1):
        members = np.flatnonzero(fronts == level)
        if len(chosen) + members.size <= n:
            chosen.extend(members.tolist())
            if len(chosen) == n:
                break
        else:
            crowd = crowding_distance(objs[members])
            ranked = sorted(
                range(members.size),
                key=lambda i: (-crowd[i], objs[members[i], 0], members[i]),
            )
            chosen.extend(members[i] for i in ranked[: n - len(chosen)])
            break
    return [pool[i] for i in chosen]


def cso_loser_update(
    x_loser: np.ndarray,
    v_loser: np.ndarray,
    x_winner: np.ndarray,
    x_mean: np.ndarray,
    phi: float,
    r1: np.ndarray,
    r2: np.ndarray,
    r3: np.ndarray,
    lo: float,
    hi: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Velocity and position of a competition loser."""
    velocity = r1 * v_loser + r2 * (x_winner - x_loser) + phi * r3 * (x_mean - x_loser)
    position = np.clip(x_loser + velocity, lo, hi)
    return position, velocity


def cso_step(
    pop: list[Individual],
    mode: str,
    phi: float,
    bounds: tuple[float, float],
    rng: np.random.Generator,
) -> list[Individual]:
    """One competitive-swarm generation.

    The shuffled population is paired; each pair's winner (by
    :func:`compare`) passes through unchanged while the loser moves toward
    the winner and the pre-step population mean, with fresh uniform
    coefficients per coordinate.  Moved losers come back unevaluated with
    ``full_repr`` cleared for the owner task to reconstruct.  An odd leftover
    passes through unchanged.
    """
    n = len(pop)
    lo, hi = bounds
    dim = pop[0].task_repr.shape[0]
    perm = rng.permutation(n)
    x_mean = np.mean([ind.task_repr for ind in pop], axis=0)
    out: list[Individual] = []
    for p in range(n // 2):
        ia, ib = int(perm[2 * p]), int(perm[2 * p + 1])
        a_wins = compare(pop[ia].objectives, pop[ib].objectives, mode)
        winner, loser = (pop[ia], pop[ib]) if a_wins else (pop[ib], pop[ia])
        r1 = rng.random(dim)
        r2 = rng.random(dim)
        r3 = rng.random(dim)
        position, velocity = cso_loser_update(
            loser.task_repr, loser.velocity, winner.task_repr, x_mean, phi, r1, r2, r3, lo, hi
        )
        out.append(winner)
        out.append(Individual(position, velocity, None, loser.task_id))
    if n % 2:
        out.append(pop[int(perm[-1])])
    return out


def polynomial_mutation(
    x: np.ndarray,
    eta: float,
    p_m: float,
    bounds: tuple[float, float],
    rng: np.random.Generator,
) -> np.ndarray:
    """Bounded polynomial mutation: each coordinate perturbed with
    probability ``p_m`` using distribution index ``eta``."""
    x = np.asarray(x, dtype=np.float64)
    lo, hi = bounds
    span = hi - lo
    gate = rng.random(x.shape[0]) < p_m
    u = rng.random(x.shape[0])
    delta1 = (x - lo) / span
    delta2 = (hi - x) / span
    power = 1.0 / (eta + 1.0)
    low = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - delta1) ** (eta + 1.0)
    high = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - delta2) ** (eta + 1.0)
    delta_q = np.where(u <= 0.5, low**power - 1.0, 1.0 - high**power)
    mutated = np.clip(x + delta_q * span, lo, hi)
    return np.where(gate, mutated, x)


def update_elite(
    archive: list[Individual],
    pop: list[Individual],
    capacity: int,
    rng: np.random.Generator,
    norm_dir: str = "inverted",
) -> list[Individual]:
    """Accuracy-biased archive update.

    Candidates (archive then population, deduplicated on the selection bit
    pattern) go through two non-dominated sorts; the (error, feature-rate)
    front is admitted with a probability tied to the normalized error
    (``inverted``: lower error, higher admission), the (error, assistant)
    front unconditionally.  Overflow keeps the lowest-error members, and the
    best-error member is always retained.
    """
    candidates: list[Individual] = []
    seen: set[bytes] = set()
    for ind in list(archive) + list(pop):
        if ind.selection_key in seen:
            continue
        seen.add(ind.selection_key)
        candidates.append(ind)
    if not candidates:
        return []

    errs = np.array([c.objectives.error_rate for c in candidates])
    frs = np.array([c.objectives.feature_rate for c in candidates])
    assists = np.array([c.objectives.assistant_error for c in candidates])
    fronts_primary = nd_sort(np.column_stack([errs, frs]))
    fronts_accuracy = nd_sort(np.column_stack([errs, assists]))

    emin, emax = errs.min(), errs.max()
    if emax > emin:
        norm = (errs - emin) / (emax - emin)
        admit_p = 1.0 - norm if norm_dir == "inverted" else norm
    else:
        admit_p = np.ones_like(errs)

    selected = np.zeros(len(candidates), dtype=bool)
    for i in np.flatnonzero(fronts_primary == 0):
        if rng.random() < admit_p[i]:
            selected[i] = True
    selected |= fronts_accuracy == 0

    best = min(range(len(candidates)), key=lambda i: (errs[i], frs[i], i))
    selected[best] = True

    chosen = np.flatnonzero(selected)
    if chosen.size > capacity:
        ranked = sorted(chosen.tolist(), key=lambda i: (errs[i], frs[i], i))
        keep = set(ranked[:capacity])
        chosen = np.array([i for i in chosen if i in keep])
    return [candidates[i] for i in chosen]
