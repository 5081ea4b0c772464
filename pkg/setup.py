"""Build script: compiles the optional Cython kernel.

The extension is marked optional; if compilation fails (no compiler, or
BBCSEC_NO_EXT=1 is set) the package installs anyway and falls back to the
pure-numpy kernels at import time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("BBCSEC_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext = Extension(
            "bbcsec._core._kernels",
            ["src/bbcsec/_core/_kernels.pyx"],
            extra_compile_args=["-O3"],
            optional=True,
        )
        ext_modules = cythonize(
            [ext],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
