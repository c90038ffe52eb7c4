"""Orchestration of the multitask search: task construction, per-task
competitive-swarm generations, stagnation detection, and cross-task
knowledge transfer."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mtfs import rng as streams
from mtfs.clustering import ClusterMap, correlation_cluster, select_prime, wo_expand, wo_reduce
from mtfs.config import RunConfig, _parse_formulation, population_size
from mtfs.dataset import Dataset, stratified_folds
from mtfs.evaluation import Individual, SubsetEvaluator
from mtfs.filtering import TaskMask, chi_square_scores, knee_point_mask, relieff_scores
from mtfs.relevance import RelevanceMask, SUScores, remove_irrelevant
from mtfs.search import (
    AUXILIARY,
    ERROR_ONLY,
    ORIGINAL,
    cso_step,
    environmental_selection,
    nd_sort,
    polynomial_mutation,
    update_elite,
)

FORM_ORIGINAL = "original"
FORM_FILTERING = "filtering"
FORM_CLUSTERING = "clustering"


@dataclass
class Task:
    id: int
    form: str
    mode: str
    dim: int
    bounds: tuple[float, float]
    pop_size: int
    pop: list[Individual] = field(default_factory=list)
    elite: list[Individual] = field(default_factory=list)
    mask: TaskMask | None = None  # filtering only
    cluster_map: ClusterMap | None = None  # clustering only
    prime: np.ndarray | None = None  # clustering only

    def best_error(self) -> float:
        return min(m.objectives.error_rate for m in self.elite)

    def elite_keys(self) -> frozenset[bytes]:
        return frozenset(m.selection_key for m in self.elite)


@dataclass
class RunState:
    generation: int = 0
    stagnation: dict[int, int] = field(default_factory=dict)
    transfer_log: list[tuple[int, int, int]] = field(default_factory=list)  # (gen, task, moved)


@dataclass
class RunResult:
    front: list[Individual]
    tasks: list[Task]
    relevance_mask: RelevanceMask
    su_scores: SUScores
    state: RunState


def _task_mode(task_index: int, fitness: str) -> str:
    if fitness == "fit1":
        return ORIGINAL
    if fitness == "fit2":
        return ERROR_ONLY
    return ORIGINAL if task_index == 0 else AUXILIARY


def reconstruct_full(ind: Individual, task: Task) -> np.ndarray:
    """Full-dimensional solution implied by an individual's task-space
    representation under the owning task's formulation."""
    if task.form == FORM_ORIGINAL:
        return ind.task_repr.copy()
    if task.form == FORM_FILTERING:
        full = np.zeros(task.mask.selected.shape[0])
        full[task.mask.selected] = ind.task_repr
        return full
    return wo_expand(ind.task_repr, task.prime, task.cluster_map)


def _project_to_task(full_v: np.ndarray, task: Task) -> np.ndarray:
    """Task-space representation of a full-dimensional solution."""
    if task.form == FORM_ORIGINAL:
        return full_v.copy()
    if task.form == FORM_FILTERING:
        return full_v[task.mask.selected].copy()
    return wo_reduce(full_v, task.prime, task.cluster_map)


def _init_population(task: Task, evaluator: SubsetEvaluator, rng: np.random.Generator) -> None:
    lo, hi = task.bounds
    for _ in range(task.pop_size):
        position = rng.uniform(lo, hi, task.dim)
        ind = Individual(position, np.zeros(task.dim), None, task.id)
        ind.full_repr = reconstruct_full(ind, task)
        evaluator.evaluate_individual(ind)
        task.pop.append(ind)


def build_tasks(
    x_kept: np.ndarray,
    labels: np.ndarray,
    n_classes: int,
    su_kept: np.ndarray,
    config: RunConfig,
    evaluator: SubsetEvaluator,
    seed: int,
    raw_dim: int,
) -> list[Task]:
    """Original task plus one auxiliary task per configured formulation.

    The original task is built and evaluated first so clustering tasks can
    pick their reference solution from already-populated archives.
    """
    n = population_size(raw_dim, config.pop_size)
    d_kept = x_kept.shape[1]
    tasks: list[Task] = []

    original = Task(0, FORM_ORIGINAL, _task_mode(0, config.fitness), d_kept, (0.0, 1.0), n)
    _init_population(original, evaluator, streams.child_rng(seed, streams.TASK_INIT, 0))
    original.elite = update_elite(
        [], original.pop, n, streams.child_rng(seed, streams.ELITE_INIT, 0), config.norm_dir
    )
    tasks.append(original)

    for offset, name in enumerate(config.auxiliary_formulations(), start=1):
        kind, bins = _parse_formulation(name)
        if kind == "relieff":
            scores = relieff_scores(x_kept, labels, n_classes)
            mask = knee_point_mask(scores)
            task = Task(offset, FORM_FILTERING, _task_mode(offset, config.fitness), mask.dim, (0.0, 1.0), n, mask=mask)
        elif kind == "chi2":
            scores = chi_square_scores(x_kept, labels, n_classes, config.n_bins)
            mask = knee_point_mask(scores)
            task = Task(offset, FORM_FILTERING, _task_mode(offset, config.fitness), mask.dim, (0.0, 1.0), n, mask=mask)
        else:
            cmap = correlation_cluster(x_kept, su_kept, bins)
            prime = select_prime([m for t in tasks for m in t.elite])
            task = Task(
                offset,
                FORM_CLUSTERING,
                _task_mode(offset, config.fitness),
                cmap.n_clusters,
                (0.0, 2.0),
                n,
                cluster_map=cmap,
                prime=prime,
            )
        _init_population(task, evaluator, streams.child_rng(seed, streams.TASK_INIT, offset))
        task.elite = update_elite(
            [], task.pop, n, streams.child_rng(seed, streams.ELITE_INIT, offset), config.norm_dir
        )
        tasks.append(task)
    return tasks


def _sbx_child(
    p1: np.ndarray, p2: np.ndarray, rng: np.random.Generator, eta: float = 20.0
) -> np.ndarray:
    """First child of simulated binary crossover, clipped to [0, 1]."""
    u = rng.random(p1.shape[0])
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (2.0 * (1.0 - u)) ** (-1.0 / (eta + 1.0)),
    )
    child = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    return np.clip(child, 0.0, 1.0)


def _transferred_full(
    p1: Individual,
    p2: Individual,
    source: Task,
    theta: float,
    transfer_mode: str,
    rng: np.random.Generator,
) -> np.ndarray:
    """Full-dimensional solution produced by one knowledge-transfer draw."""
    if transfer_mode == "sbx-style":
        return _sbx_child(p1.full_repr, p2.full_repr, rng)
    if source.form == FORM_FILTERING:
        # the donor's thresholded selection acts as a mask on the receiver
        mask = p2.full_repr > theta
        return np.where(mask, p1.full_repr, 0.0)
    if source.form == FORM_CLUSTERING:
        # the donor's weights are applied with the receiver as reference
        return wo_expand(p2.task_repr, p1.full_repr, source.cluster_map)
    # donor from the original task: its full solution is the reference
    return p2.full_repr.copy()


def knowledge_transfer(
    tasks: list[Task],
    config: RunConfig,
    evaluator: SubsetEvaluator,
    seed: int,
    gen: int,
    state: RunState,
) -> None:
    """One cross-task transfer event.

    All tasks read a pre-event snapshot of every archive.  Per population
    slot, the transfer gate fires with probability rtp; the transferred (or
    copied) solution is projected into the receiving task's space, mutated,
    evaluated, and competes in environmental selection.
    """
    snapshot: dict[int, list[Individual]] = {t.id: list(t.elite) for t in tasks}
    all_elites = [m for t in tasks for m in snapshot[t.id]]

    for task in tasks:
        rng = streams.child_rng(seed, streams.TRANSFER, task.id, gen)
        if task.form == FORM_CLUSTERING:
            new_prime = select_prime(all_elites)
            if task.prime is None or not np.array_equal(new_prime, task.prime):
                task.prime = new_prime
                # weights now expand against the new reference; re-sync
                for member in task.pop:
                    member.full_repr = reconstruct_full(member, task)
                    evaluator.evaluate_individual(member)
        pool = [(m, t) for t in tasks if t.id != task.id for m in snapshot[t.id]]
        lo, hi = task.bounds
        p_m = 1.0 / task.dim
        moved = 0
        offspring: list[Individual] = []
        for slot in range(task.pop_size):
            p1 = task.pop[slot]
            transferred = rng.random() < config.rtp and bool(pool)
            if transferred:
                donor, source = pool[int(rng.integers(len(pool)))]
                new_full = _transferred_full(p1, donor, source, config.theta, config.transfer, rng)
                task_repr = _project_to_task(new_full, task)
                moved += 1
            else:
                task_repr = p1.task_repr.copy()
            task_repr = polynomial_mutation(task_repr, config.pm_eta, p_m, (lo, hi), rng)
            child = Individual(task_repr, np.zeros(task.dim), None, task.id)
            child.full_repr = reconstruct_full(child, task)
            evaluator.evaluate_individual(child)
            offspring.append(child)
        task.pop = environmental_selection(task.pop + offspring, task.mode, task.pop_size)
        task.elite = update_elite(
            task.elite,
            task.pop,
            task.pop_size,
            streams.child_rng(seed, streams.TRANSFER_ELITE, task.id, gen),
            config.norm_dir,
        )
        state.transfer_log.append((gen, task.id, moved))


def final_front(tasks: list[Task]) -> list[Individual]:
    """Deduplicated union of all archives reduced to its non-dominated front
    on (error rate, feature rate)."""
    union: list[Individual] = []
    seen: set[bytes] = set()
    for task in tasks:
        for member in task.elite:
            if member.selection_key in seen:
                continue
            seen.add(member.selection_key)
            union.append(member)
    if not union:
        return []
    objs = np.array([(m.objectives.error_rate, m.objectives.feature_rate) for m in union])
    fronts = nd_sort(objs)
    return [m for m, f in zip(union, fronts) if f == 0]


def run(
    training: Dataset,
    config: RunConfig,
    seed: int,
    observer=None,
) -> RunResult:
    """Full multitask search on one (scaled) training split.

    Relevance removal, task construction, ``max_iter`` competitive-swarm
    generations with elite archives, and transfer events whenever any task's
    archive has gone ``config.stagnation`` generations without progress.
    ``observer(gen, tasks)`` is called after every generation.
    """
    if config.removal:
        mask, su = remove_irrelevant(training, config.su_lambda, config.n_bins, config.su_log_base)
    else:
        _, su = remove_irrelevant(training, config.su_lambda, config.n_bins, config.su_log_base)
        mask = RelevanceMask(
            np.arange(training.n_features, dtype=np.int64), -np.inf, training.n_features
        )
    x_kept = np.ascontiguousarray(training.features[:, mask.kept_indices])
    su_kept = su.su_with_class[mask.kept_indices]

    inner = stratified_folds(
        training, config.inner_folds, streams.child_rng(seed, streams.INNER_SPLIT)
    )
    evaluator = SubsetEvaluator(
        x_kept, training.labels, inner, training.n_classes, config.knn_k, config.theta
    )
    tasks = build_tasks(
        x_kept,
        training.labels,
        training.n_classes,
        su_kept,
        config,
        evaluator,
        seed,
        raw_dim=training.n_features,
    )
    state = RunState(stagnation={t.id: 0 for t in tasks})

    for gen in range(1, config.max_iter + 1):
        state.generation = gen
        for task in tasks:
            for member in task.pop:
                if member.objectives is None:
                    member.full_repr = reconstruct_full(member, task)
                    evaluator.evaluate_individual(member)
            rng = streams.child_rng(seed, streams.CSO, task.id, gen)
            stepped = cso_step(task.pop, task.mode, config.phi, task.bounds, rng)
            offspring = [ind for ind in stepped if ind.objectives is None]
            for child in offspring:
                child.full_repr = reconstruct_full(child, task)
                evaluator.evaluate_individual(child)
            task.pop = environmental_selection(task.pop + offspring, task.mode, task.pop_size)

            prev_best = task.best_error() if task.elite else np.inf
            prev_keys = task.elite_keys()
            task.elite = update_elite(
                task.elite,
                task.pop,
                task.pop_size,
                streams.child_rng(seed, streams.ELITE, task.id, gen),
                config.norm_dir,
            )
            # progress = a better error or a selection pattern never archived
            # before; drops alone are admission noise, not progress
            improved = task.best_error() < prev_best or bool(task.elite_keys() - prev_keys)
            state.stagnation[task.id] = 0 if improved else state.stagnation[task.id] + 1

        if (
            config.transfer != "off"
            and len(tasks) > 1
            and any(c >= config.stagnation for c in state.stagnation.values())
        ):
            knowledge_transfer(tasks, config, evaluator, seed, gen, state)
            for tid in state.stagnation:
                state.stagnation[tid] = 0

        if observer is not None:
            observer(gen, tasks)

    return RunResult(final_front(tasks), tasks, mask, su, state)
