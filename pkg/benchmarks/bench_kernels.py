"""Benchmark the compiled nearest-neighbour kernel against the pure-NumPy
fallback on representative fitness-evaluation workloads.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from mtfs import kernels

WORKLOADS = [
    # (n_samples, n_selected_features, n_classes, n_folds)
    (60, 10, 2, 5),
    (100, 50, 3, 5),
    (160, 200, 3, 5),
    (80, 1000, 4, 5),
]


def time_call(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"backends: {', '.join(sorted(backends))}  (active: {kernels.BACKEND})")
    header = f"{'workload (n x d, C, folds)':<30}" + "".join(f"{name:>14}" for name in sorted(backends))
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    rng = np.random.default_rng(0)
    for n, d, n_classes, n_folds in WORKLOADS:
        x = rng.random((n, d))
        y = rng.integers(0, n_classes, n)
        y[:n_classes] = np.arange(n_classes)
        folds = np.arange(n) % n_folds
        results = {}
        for name in sorted(backends):
            impl = backends[name]
            impl.knn_cv_errors(x, y, folds, n_folds, 5, n_classes)  # warm up
            results[name] = time_call(
                impl.knn_cv_errors, x, y, folds, n_folds, 5, n_classes, repeats=args.repeats
            )
        row = f"{f'{n} x {d}, {n_classes}, {n_folds}':<30}" + "".join(
            f"{results[name] * 1e3:>12.2f}ms" for name in sorted(results)
        )
        if "compiled" in results and "pure" in results:
            row += f"{results['pure'] / results['compiled']:>9.1f}x"
        print(row)

    if "compiled" in backends and "pure" in backends:
        x = rng.random((120, 300))
        y = rng.integers(0, 3, 120)
        y[:3] = [0, 1, 2]
        folds = np.arange(120) % 5
        a = backends["compiled"].knn_cv_errors(x, y, folds, 5, 5, 3)
        b = backends["pure"].knn_cv_errors(x, y, folds, 5, 5, 3)
        print(f"\nagreement check: compiled={a}  pure={b}")


if __name__ == "__main__":
    main()
