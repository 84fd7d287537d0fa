"""Build script for the optional compiled kernels.

The extension is optional: when Cython or a compiler is missing the package
installs without it and falls back to the numpy kernels at import time.
"""
import os

import numpy as np
from setuptools import setup

ext_modules = []
if os.environ.get("SPARSEINTERP_NO_EXT", "0") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        extensions = [
            Extension(
                "sparseinterp._kernels",
                ["src/sparseinterp/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ]
        ext_modules = cythonize(
            extensions,
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
