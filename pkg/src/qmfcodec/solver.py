"""Quantization-aware matrix factorization by block coordinate descent.

Finds integer factors ``U`` (M x R) and ``V`` (N x R) with every element in
``[alpha, beta]`` that make ``U @ V.T`` close to ``X`` in Frobenius norm. The
solver starts from a rounded, clamped truncated SVD and then cycles through
the columns of ``U`` and ``V``; each column has a closed-form optimal integer
update given all the others.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .kernels import round_half_away
from .linalg import as_matrix, truncated_svd

__all__ = [
    "Bounds",
    "IntFactorPair",
    "QmfConfig",
    "DegenerateColumnError",
    "rank_from_quality",
    "objective",
    "init_factors",
    "update_column",
    "bcd_sweep",
    "bcd_solve",
]


class DegenerateColumnError(ValueError):
    """The fixed partner column is all zeros, so the update is undefined."""


@dataclass(frozen=True)
class Bounds:
    alpha: int = -16
    beta: int = 15

    def __post_init__(self):
        if int(self.alpha) != self.alpha or int(self.beta) != self.beta:
            raise ValueError("bounds must be integers")
        if not -128 <= self.alpha <= self.beta <= 127:
            raise ValueError(
                f"bounds [{self.alpha}, {self.beta}] must satisfy "
                "-128 <= alpha <= beta <= 127")

    @classmethod
    def parse(cls, text: str) -> "Bounds":
        """Parse ``"A,B"``."""
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 'A,B', got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    @property
    def width(self) -> int:
        return self.beta - self.alpha + 1


@dataclass(frozen=True, eq=False)
class IntFactorPair:
    """Integer factors with ``U @ V.T`` approximating a matrix.

    Both factors are stored as ``int8`` arrays.
    """

    u: np.ndarray
    v: np.ndarray
    bounds: Bounds = field(default_factory=Bounds)

    def __post_init__(self):
        u = np.asarray(self.u)
        v = np.asarray(self.v)
        if u.ndim != 2 or v.ndim != 2 or u.shape[1] != v.shape[1] or u.shape[1] < 1:
            raise ValueError(f"factor shapes {u.shape} and {v.shape} do not form a pair")
        for name, a in (("u", u), ("v", v)):
            if a.size and (a.min() < self.bounds.alpha or a.max() > self.bounds.beta):
                raise ValueError(f"{name} has elements outside [{self.bounds.alpha}, {self.bounds.beta}]")
            if not np.array_equal(a, np.round(a)):
                raise ValueError(f"{name} has non-integer elements")
        object.__setattr__(self, "u", u.astype(np.int8))
        object.__setattr__(self, "v", v.astype(np.int8))

    @property
    def rank(self) -> int:
        return self.u.shape[1]

    def product(self) -> np.ndarray:
        return self.u.astype(np.float64) @ self.v.astype(np.float64).T

    def __eq__(self, other):
        if not isinstance(other, IntFactorPair):
            return NotImplemented
        return (self.bounds == other.bounds and np.array_equal(self.u, other.u)
                and np.array_equal(self.v, other.v))


@dataclass(frozen=True)
class QmfConfig:
    """Encoder knobs. Exactly one of ``quality`` and ``rank`` is set."""

    quality: Optional[float] = None
    rank: Optional[int] = None
    bounds: Bounds = field(default_factory=Bounds)
    iterations: int = 10
    patch_size: int = 8

    def __post_init__(self):
        if self.quality is None and self.rank is None:
            object.__setattr__(self, "quality", 0.1)
        if (self.quality is None) == (self.rank is None):
            raise ValueError("set exactly one of quality and rank")
        if self.quality is not None and not 0.0 <= self.quality <= 1.0:
            raise ValueError(f"quality {self.quality} outside [0, 1]")
        if self.rank is not None and self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not 1 <= self.patch_size <= 255:
            raise ValueError("patch_size must be in [1, 255]")

    def rank_for(self, m: int, n: int) -> int:
        if self.rank is not None:
            return min(self.rank, m, n)
        return rank_from_quality(self.quality, m, n)


def rank_from_quality(quality: float, m: int, n: int) -> int:
    if not 0.0 <= quality <= 1.0:
        raise ValueError(f"quality {quality} outside [0, 1]")
    if m < 1 or n < 1:
        raise ValueError("matrix dimensions must be positive")
    r = int(round_half_away(quality * min(m, n)))
    return max(r, 1)


def objective(x, f: IntFactorPair) -> float:
    """Squared Frobenius norm of ``x - U @ V.T``."""
    x = as_matrix(x, "x", finite=False)
    if f.u.shape[0] != x.shape[0] or f.v.shape[0] != x.shape[1]:
        raise ValueError(f"factors {f.u.shape}, {f.v.shape} do not match matrix {x.shape}")
    r = x - f.product()
    return float(np.vdot(r, r))


def _project(z, bounds: Bounds) -> np.ndarray:
    return np.clip(round_half_away(z), bounds.alpha, bounds.beta)


def init_factors(x, r: int, bounds: Bounds = Bounds()) -> IntFactorPair:
    """SVD start: each factor carries the square root of the singular values.

    ``U = clamp(round(Ut * sqrt(s)))`` and ``V = clamp(round(Vt * sqrt(s)))``,
    i.e. column ``j`` of both singular bases is scaled by ``sqrt(s[j])``.
    """
    x = as_matrix(x, "x")
    svd = truncated_svd(x, r)
    root = np.sqrt(svd.sigma)
    return IntFactorPair(_project(svd.u * root, bounds), _project(svd.v * root, bounds), bounds)


def update_column(e_r, other, bounds: Bounds = Bounds()) -> np.ndarray:
    """Optimal integer column ``u`` for ``min ||e_r - u other^T||_F^2``.

    Raises :class:`DegenerateColumnError` if ``other`` is all zeros.
    """
    e_r = as_matrix(e_r, "e_r", finite=False)
    other = np.asarray(other, dtype=np.float64).ravel()
    if other.shape[0] != e_r.shape[1]:
        raise ValueError(f"column length {other.shape[0]} does not match residual {e_r.shape}")
    norm2 = float(other @ other)
    if norm2 == 0.0:
        raise DegenerateColumnError("partner column is all zeros")
    return _project((e_r @ other) / norm2, bounds).astype(np.int64)


ColumnCallback = Callable[[str, int, np.ndarray, np.ndarray], None]


def _half(x, fixed, moving, bounds, callback, label, u_side):
    A = np.ascontiguousarray(x @ fixed)
    B = np.ascontiguousarray(fixed.T @ fixed)
    if callback is None:
        kernels.half_sweep(A, B, moving, float(bounds.alpha), float(bounds.beta))
        return
    for r in range(moving.shape[1]):
        kernels.update_column(A, B, moving, r, float(bounds.alpha), float(bounds.beta))
        if u_side:
            callback(label, r, moving, fixed)
        else:
            callback(label, r, fixed, moving)


def bcd_sweep(x, u: np.ndarray, v: np.ndarray, bounds: Bounds,
              callback: Optional[ColumnCallback] = None) -> None:
    """One BCD iteration, updating float64 factor arrays ``u`` and ``v`` in place.

    All columns of ``u`` are visited first, then all columns of ``v``.
    ``callback(which, r, u, v)`` runs after every column update.
    """
    _half(x, v, u, bounds, callback, "u", True)
    _half(x.T, u, v, bounds, callback, "v", False)


def bcd_solve(x, r: int, bounds: Bounds = Bounds(), k: int = 10, *,
              callback: Optional[ColumnCallback] = None,
              stop_when_stable: bool = False) -> IntFactorPair:
    """Run the SVD start followed by ``k`` BCD sweeps.

    With ``stop_when_stable`` the loop ends early once a sweep leaves both
    factors unchanged, which cannot alter the result.
    """
    if k < 0:
        raise ValueError("iteration count must be >= 0")
    x = as_matrix(x, "x")
    start = init_factors(x, r, bounds)
    u = np.ascontiguousarray(start.u, dtype=np.float64)
    v = np.ascontiguousarray(start.v, dtype=np.float64)
    xt = np.ascontiguousarray(x.T)
    for _ in range(k):
        if stop_when_stable:
            before = (u.copy(), v.copy())
        _half(x, v, u, bounds, callback, "u", True)
        _half(xt, u, v, bounds, callback, "v", False)
        if stop_when_stable and np.array_equal(before[0], u) and np.array_equal(before[1], v):
            break
    return IntFactorPair(u, v, bounds)
