"""Deterministic derivation of independent random streams.

Every stochastic step draws from a generator keyed by (seed, purpose, ...);
the same key always yields the same stream, so single-worker and
multi-worker executions of the same configuration are reproducible.
"""

from __future__ import annotations

import numpy as np

# spawn-key tags; ints keep SeedSequence keys hashable and compact
OUTER_SPLIT = 0
INNER_SPLIT = 1
FOLD_SEED = 2
TASK_INIT = 3
ELITE_INIT = 4
CSO = 5
ELITE = 6
TRANSFER = 7
TRANSFER_ELITE = 8


def child_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream identified by (seed, *key)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key)))


def child_seed(seed: int, *key: int) -> int:
    """Derived integer seed (used to hand a whole subtree to a worker)."""
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(seq.generate_state(1, dtype=np.uint64)[0])
