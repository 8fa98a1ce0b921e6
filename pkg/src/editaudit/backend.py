"""Kernel backend selection.

The compiled Cython extension is preferred; the NumPy fallback is used when
the extension is missing or when ``EDITAUDIT_PURE=1`` is set (the benchmark
uses the env var to compare both). Both expose the same functions and must
produce identical results.
"""

from __future__ import annotations

import os

if os.environ.get("EDITAUDIT_PURE", "") not in ("", "0"):
    from . import _pykernels as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _pykernels as kernels  # type: ignore[no-redef]


def backend_name() -> str:
    """'compiled' when the extension is active, 'python' otherwise."""
    return kernels.BACKEND_NAME
