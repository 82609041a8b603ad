"""Dense real matrix helpers and truncated SVD.

Matrices are plain ``numpy.ndarray`` objects of dtype float64; nothing here
keeps state, so every function is safe to call from several threads.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = ["SvdTriplet", "as_matrix", "matmul", "truncated_svd", "subspace_svd"]


class SvdTriplet(NamedTuple):
    """Top-``r`` singular triplet ``u @ diag(sigma) @ v.T``.

    ``u`` is M x r, ``v`` is N x r, both with orthonormal columns, and
    ``sigma`` is sorted in nonincreasing order.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


def as_matrix(x, name: str = "matrix", *, finite: bool = True) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if finite and not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")
    return a


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "a", finite=False)
    b = as_matrix(b, "b", finite=False)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


def _fix_signs(u: np.ndarray, v: np.ndarray) -> None:
    # first nonzero entry of each right singular vector is made positive
    for j in range(v.shape[1]):
        nz = np.flatnonzero(v[:, j])
        if nz.size and v[nz[0], j] < 0:
            v[:, j] *= -1.0
            u[:, j] *= -1.0


def _check_rank(x: np.ndarray, r: int) -> None:
    if not 1 <= r <= min(x.shape):
        raise ValueError(f"rank {r} out of range [1, {min(x.shape)}]")


def truncated_svd(x, r: int) -> SvdTriplet:
    """Best rank-``r`` approximation of ``x`` as a singular triplet.

    Uses LAPACK's thin SVD, which is exact and deterministic for the matrix
    sizes the codec produces. Singular vector signs are normalised so that
    the first nonzero component of every right singular vector is positive.
    """
    x = as_matrix(x, "x")
    r = int(r)
    _check_rank(x, r)
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    u = np.ascontiguousarray(u[:, :r])
    v = np.ascontiguousarray(vt[:r].T)
    _fix_signs(u, v)
    return SvdTriplet(u, s[:r].copy(), v)


def subspace_svd(x, r: int, *, tol: float = 1e-10, max_iter: int = 1000,
                 seed: int = 0) -> SvdTriplet:
    """Truncated SVD by block power (subspace) iteration.

    Meant for matrices too large for a dense factorisation. Iterates an
    orthonormal basis of the dominant right singular subspace until the
    Ritz values change by less than ``tol`` (relative), then extracts the
    triplet by a small Rayleigh-Ritz step. The start block comes from a
    seeded generator so results are reproducible.
    """
    x = as_matrix(x, "x")
    r = int(r)
    _check_rank(x, r)
    m, n = x.shape
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    prev = None
    for _ in range(max_iter):
        z, _ = np.linalg.qr(x @ q)
        q, _ = np.linalg.qr(x.T @ z)
        ritz = np.linalg.norm(x @ q, axis=0)
        if prev is not None and np.max(np.abs(ritz - prev)) <= tol * max(ritz.max(), 1e-300):
            break
        prev = ritz
    # Rayleigh-Ritz on the converged subspace
    small_u, s, small_vt = np.linalg.svd(x @ q, full_matrices=False)
    u = np.ascontiguousarray(small_u[:, :r])
    v = np.ascontiguousarray(q @ small_vt.T[:, :r])
    _fix_signs(u, v)
    return SvdTriplet(u, s[:r].copy(), v)
