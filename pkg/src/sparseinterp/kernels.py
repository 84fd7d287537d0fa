"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``SPARSEINTERP_PURE_PYTHON`` is set to ``1``, the numpy
fallback is used. :data:`BACKEND` names the active implementation.
"""

import os

from . import _fallback

if os.environ.get("SPARSEINTERP_PURE_PYTHON", "0") == "1":
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _fallback

BACKEND = "python" if _impl is _fallback else "compiled"

jacobi_sweeps = _impl.jacobi_sweeps
schur_accumulate = _impl.schur_accumulate
