"""Pure numpy implementations of the BCD kernels.

These mirror ``_kernels.pyx`` operation for operation. The mixed sum
``sum_{s != r} B[s, r] * U[:, s]`` only involves integer-valued doubles far
below 2**53, so it is exact regardless of summation order; together with the
identical rounding rule this makes both backends produce bit-identical
factors.
"""
import numpy as np


def round_half_away(x):
    x = np.asarray(x, dtype=np.float64)
    a = np.abs(x)
    f = np.floor(a)
    return np.copysign(f + (a - f >= 0.5), x)


def update_column(A, B, U, r, alpha, beta):
    """Closed-form update of column ``r`` of ``U`` in place.

    Returns False (and leaves the column alone) when ``B[r, r]`` is zero.
    """
    d = B[r, r]
    if d == 0.0:
        return False
    s = U @ B[:, r] - U[:, r] * d
    q = round_half_away((A[:, r] - s) / d)
    np.clip(q, alpha, beta, out=q)
    U[:, r] = q
    return True


def half_sweep(A, B, U, alpha, beta):
    for r in range(U.shape[1]):
        update_column(A, B, U, r, alpha, beta)
