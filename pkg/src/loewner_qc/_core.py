"""Backend selection for the chain-limit kernel.

The compiled kernel is used when it was built and ``LOEWNER_QC_PURE`` is not set
to ``1``; otherwise the pure-Python implementation takes over with the same API.
"""

import os

from . import _fallback

BACKEND = "python"
_backend = _fallback

if os.environ.get("LOEWNER_QC_PURE") != "1":
    try:
        from . import _kernels as _backend

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _backend = _fallback


def chain_limits(spec, ts, zs, horizons, rtol, atol, tol):
    return _backend.chain_limits(spec, ts, zs, horizons, rtol, atol, tol)
