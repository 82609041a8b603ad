"""Backend selection for the BCD inner loop.

The compiled extension is used when it has been built; otherwise the numpy
fallback is loaded. Setting ``QMF_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _fallback

fallback = _fallback
compiled = None

if os.environ.get("QMF_PURE_PYTHON", "") not in ("", "0"):
    active = _fallback
else:
    try:
        from . import _kernels as compiled
    except ImportError:  # extension not built
        active = _fallback
    else:
        active = compiled

BACKEND = "compiled" if active is compiled else "python"

half_sweep = active.half_sweep
update_column = active.update_column


def round_half_away(x):
    # elementwise, any shape; the fallback is already vectorised
    return _fallback.round_half_away(x)
