"""Build script for the compiled nearest-neighbour kernel.

The extension is optional: when Cython or a C compiler is unavailable the
package installs anyway and falls back to the pure-NumPy kernel at import
time (see mtfs/kernels.py).
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "mtfs._knn_kernel",
                ["src/mtfs/_knn_kernel.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
