"""Kernel backend selection.

Prefers the compiled Cython extension; falls back to the NumPy
implementation when the extension is missing or when the environment
variable REGLUE_PURE_PYTHON is set.
"""

import os

if os.environ.get("REGLUE_PURE_PYTHON"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

BACKEND = kernels.BACKEND
