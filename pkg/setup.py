"""Build script. Compiles the optional Cython kernel module.

The package works without the compiled extension (a NumPy fallback is
selected at import time), so any failure to build it is non-fatal.
Set REGLUE_SKIP_EXT=1 to skip the extension build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("REGLUE_SKIP_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "reglue._kernels",
                    ["src/reglue/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
