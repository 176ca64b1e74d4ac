"""Kernel backend selection.

``APXADDER_BACKEND=numpy`` forces the pure-numpy kernels,
``APXADDER_BACKEND=numba`` demands the jitted ones (ImportError if numba is
missing); unset or ``auto`` tries numba first and falls back silently.
Both backends produce bit-identical results.
"""

from __future__ import annotations

import os

_choice = os.environ.get("APXADDER_BACKEND", "auto").strip().lower() or "auto"
if _choice not in ("auto", "numba", "numpy"):
    raise ImportError(
        f"APXADDER_BACKEND must be 'numba' or 'numpy', got {_choice!r}"
    )

if _choice == "numpy":
    from . import _kernels_np as kernels

    NAME = "numpy"
else:
    try:
        from . import _kernels as kernels

        NAME = "numba"
    except ImportError:
        if _choice == "numba":
            raise
        from . import _kernels_np as kernels

        NAME = "numpy"
