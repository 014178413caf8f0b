"""Kernel backend selection.

Imports the compiled Cython kernels when available, otherwise the NumPy
fallback. Set RANDGEO_BACKEND=python to force the fallback (used by the
benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("RANDGEO_BACKEND", "").lower() == "python":
    kernels = _kernels_py
else:
    try:
        from . import _kernels_cy as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels_py

BACKEND = kernels.BACKEND_NAME

# Table builders are cheap and shared; the compiled module only accelerates
# the loops that consume them.
sparse_min_table = _kernels_py.sparse_min_table
range_min = _kernels_py.range_min
