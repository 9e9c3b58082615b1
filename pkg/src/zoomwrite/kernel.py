"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``ZOOMWRITE_PURE=1`` to force the pure kernel (used by the benchmark and
the parity tests). Both kernels implement the same contract bit-for-bit.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("ZOOMWRITE_PURE"):
    PpmKernel = _pure.PpmKernel
    KERNEL_BACKEND = "pure (forced)"
else:
    try:
        from . import _fast

        PpmKernel = _fast.PpmKernel
        KERNEL_BACKEND = "compiled"
    except (ImportError, AttributeError):
        PpmKernel = _pure.PpmKernel
        KERNEL_BACKEND = "pure"

PurePpmKernel = _pure.PpmKernel
