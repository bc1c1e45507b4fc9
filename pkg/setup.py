"""Build script for the compiled kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time); set DIGITINK_SKIP_EXT=1 to install pure-Python only.
"""

import os

import numpy as np
from setuptools import Extension, setup

if os.environ.get("DIGITINK_SKIP_EXT"):
    ext_modules = []
else:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "digitink.nn.kernels._native",
                ["src/digitink/nn/kernels/_native.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
