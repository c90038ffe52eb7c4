"""Kernel backend selection.

The compiled extension is preferred when it was built; otherwise the
pure-NumPy implementation is used.  Set MTFS_PURE_PYTHON=1 to force the
fallback (useful for the benchmark and for debugging).
"""

from __future__ import annotations

import os

from mtfs import _knn_numpy

if os.environ.get("MTFS_PURE_PYTHON", "") == "1":
    _impl = _knn_numpy
    BACKEND = "pure"
else:
    try:
        from mtfs import _knn_kernel as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _knn_numpy
        BACKEND = "pure"

knn_predict = _impl.knn_predict
knn_cv_errors = _impl.knn_cv_errors


def available_backends() -> dict[str, object]:
    """Importable kernel modules keyed by backend name."""
    backends: dict[str, object] = {"pure": _knn_numpy}
    try:
        from mtfs import _knn_kernel

        backends["compiled"] = _knn_kernel
    except ImportError:
        pass
    return backends
