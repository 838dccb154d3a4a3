"""Kernel backend selection.

Imports the compiled extension when it is available and falls back to
the NumPy implementations otherwise.  Set ``ACACTION_FORCE_NUMPY=1`` to
skip the extension (used by the benchmark and the equivalence tests).
"""

import os

from . import _kernels_np

if os.environ.get("ACACTION_FORCE_NUMPY", "") not in ("", "0"):
    impl = _kernels_np
    BACKEND = "numpy"
else:
    try:
        from . import _kernels_cy as impl

        BACKEND = "compiled"
    except ImportError:
        impl = _kernels_np
        BACKEND = "numpy"


def backend_name():
    """Name of the active kernel backend: 'compiled' or 'numpy'."""
    return BACKEND
