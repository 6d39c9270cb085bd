"""Kernel backend selection.

Prefers the compiled extension when it imported cleanly; falls back to the
numpy implementation otherwise. Set GAMC_KERNELS=python (or cython) to force
a backend; forcing cython when the extension is missing raises at import.
"""

import os

from . import _kernels_py

_requested = os.environ.get("GAMC_KERNELS", "auto").lower()

if _requested == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        _impl = _kernels_py
        BACKEND = "python"

neighbor_sum = _impl.neighbor_sum
