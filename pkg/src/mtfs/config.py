"""Run configuration shared by the library API and the command line."""

from __future__ import annotations

from dataclasses import dataclass, replace

DEFAULT_FORMULATIONS = ("relieff", "chi2", "cluster:10", "cluster:5")


@dataclass(frozen=True)
class RunConfig:
    data: str | None = None
    label_col: str = "last"
    seed: int = 0
    max_iter: int = 100
    n_tasks: int = 5
    theta: float = 0.6
    rtp: float = 0.6
    stagnation: int = 5  # generations without elite progress before transfer
    knn_k: int = 5
    inner_folds: int = 5
    outer_folds: int = 10
    su_lambda: float = 0.2
    n_bins: int = 10
    phi: float = 0.1
    pm_eta: float = 20.0
    removal: bool = True
    formulations: tuple[str, ...] | None = None  # None: derived from n_tasks
    transfer: str = "specific"  # specific | sbx-style | off
    fitness: str = "paper"  # paper | fit1 | fit2
    norm_dir: str = "inverted"  # inverted | literal
    su_log_base: str = "e"
    pop_size: int | None = None  # None: 1/30 of the raw feature count, in [20, 200]
    workers: int = 1
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must be in [0, 1]")
        if not 0.0 <= self.rtp <= 1.0:
            raise ValueError("rtp must be in [0, 1]")
        if not 0.0 <= self.su_lambda <= 1.0:
            raise ValueError("lambda must be in [0, 1]")
        if self.inner_folds < 2 or self.outer_folds < 2:
            raise ValueError("fold counts must be at least 2")
        if self.max_iter < 0:
            raise ValueError("max_iter must be non-negative")
        if self.n_tasks < 1:
            raise ValueError("need at least the original task")
        if self.stagnation < 1:
            raise ValueError("stagnation window must be positive")
        if self.knn_k < 1:
            raise ValueError("knn_k must be positive")
        if self.transfer not in ("specific", "sbx-style", "off"):
            raise ValueError(f"unknown transfer mode {self.transfer!r}")
        if self.fitness not in ("paper", "fit1", "fit2"):
            raise ValueError(f"unknown fitness mode {self.fitness!r}")
        if self.norm_dir not in ("inverted", "literal"):
            raise ValueError(f"unknown normalization direction {self.norm_dir!r}")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        if self.formulations is not None:
            object.__setattr__(self, "formulations", tuple(self.formulations))
            for name in self.formulations:
                _parse_formulation(name)
            object.__setattr__(self, "n_tasks", len(self.formulations) + 1)

    def auxiliary_formulations(self) -> tuple[str, ...]:
        """Auxiliary task recipes; defaults cycle through the four standard
        formulations to fill n_tasks - 1 slots."""
        if self.formulations is not None:
            return self.formulations
        k = self.n_tasks - 1
        return tuple(DEFAULT_FORMULATIONS[i % len(DEFAULT_FORMULATIONS)] for i in range(k))

    def with_options(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)


def _parse_formulation(name: str) -> tuple[str, int]:
    """Split a formulation recipe into (kind, bins)."""
    if name == "relieff":
        return ("relieff", 0)
    if name == "chi2":
        return ("chi2", 0)
    if name.startswith("cluster:"):
        bins = int(name.split(":", 1)[1])
        if bins < 2:
            raise ValueError(f"cluster formulation needs at least 2 bins: {name!r}")
        return ("cluster", bins)
    if name == "cluster":
        return ("cluster", 10)
    raise ValueError(f"unknown formulation {name!r}")


def population_size(raw_feature_count: int, override: int | None = None) -> int:
    """1/30 of the raw feature count, clipped to [20, 200]."""
    if override is not None:
        return int(override)
    return int(min(200, max(20, int(raw_feature_count / 30 + 0.5))))
