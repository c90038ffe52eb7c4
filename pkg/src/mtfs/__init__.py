"""Multi-objective feature selection through evolutionary multitasking.

The package builds one original feature-selection task plus several
simplified auxiliary tasks (mask-reduced and cluster-weight reformulations),
optimizes each with an independent competitive-swarm solver under
task-specific fitness, and exchanges task-specific knowledge (feature masks,
cluster weights, full-dimensional reference solutions) between tasks.  The
output is a Pareto set trading balanced classification error against the
number of selected features.
"""

from mtfs.config import RunConfig
from mtfs.dataset import Dataset, generate_synthetic, load_csv, stratified_folds
from mtfs.multitask import run

__all__ = [
    "Dataset",
    "RunConfig",
    "generate_synthetic",
    "load_csv",
    "run",
    "stratified_folds",
]

__version__ = "0.1.0"
