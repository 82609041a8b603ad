"""Comparison codec: real truncated SVD followed by uniform 8-bit quantization.

It runs the exact same colour/pooling/patch pipeline as the QMF codec, so
rate-distortion differences come only from how the factors are made integer.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import container
from .codec import analyse, synthesise
from .kernels import round_half_away
from .linalg import as_matrix, truncated_svd
from .solver import QmfConfig

__all__ = ["QuantizedFactor", "quantize_uniform", "dequantize", "svd_factors",
           "svd_encode", "svd_decode"]


class QuantizedFactor(NamedTuple):
    codes: np.ndarray
    scale: float
    zero_point: float

    def dequantize(self) -> np.ndarray:
        return dequantize(self)


def quantize_uniform(m) -> QuantizedFactor:
    """Min-max affine quantization of a whole matrix to codes 0..255."""
    m = as_matrix(m, "m")
    lo, hi = float(m.min()), float(m.max())
    if hi == lo:
        return QuantizedFactor(np.zeros(m.shape, dtype=np.uint8), 0.0, lo)
    scale = (hi - lo) / 255.0
    codes = np.clip(round_half_away((m - lo) / scale), 0, 255).astype(np.uint8)
    return QuantizedFactor(codes, scale, lo)


def dequantize(self) -> np.ndarray:
        return dequantize(self)


def quantize_uniform(m) -> QuantizedFactor:
    """Min-max affine quantization of a whole matrix to codes 0..255.

    Scale and zero point are float32 values (that is what the container
    stores), nudged outward so the code range still covers ``[min, max]``.
    """
    m = as_matrix(m, "m")
    lo, hi = float(m.min()), float(m.max())
    if hi == lo and float(np.float32(lo)) == lo:
        return QuantizedFactor(np.zeros(m.shape, dtype=np.uint8), 0.0, lo)
    zero = np.float32(lo)
    if float(zero) > lo:
        zero = np.nextafter(zero, np.float32(-np.inf))
    scale = np.float32((hi - float(zero)) / 255.0)
    while float(zero) + 255.0 * float(scale) < hi or scale == 0:
        scale = np.nextafter(scale, np.float32(np.inf))
    zero, scale = float(zero), float(scale)
    lo = zero
    codes = np.clip(round_half_away((m - lo) / scale), 0, 255).astype(np.uint8)
    return QuantizedFactor(codes, scale, zero)


def dequantize(q: QuantizedFactor) -> np.ndarray:
    return q.scale * q.codes.astype(np.float64) + q.zero_point


def svd_factors(x, r: int):
    """Real factors ``(Ut * sqrt(s), Vt * sqrt(s))``."""
    svd = truncated_svd(x, r)
    root = np.sqrt(svd.sigma)
    return svd.u * root, svd.v * root


def svd_encode(img, config: QmfConfig = QmfConfig()) -> bytes:
    """Encode with the baseline. Only ``quality``/``rank`` and ``patch_size`` matter."""
    pms, h, w = analyse(img, config.patch_size)
    codes, quant = [], []
    for pm in pms:
        m, n = pm.matrix.shape
        u, v = svd_factors(pm.matrix, config.rank_for(m, n))
        qu, qv = quantize_uniform(u), quantize_uniform(v)
        codes.append((qu.codes, qv.codes))
        quant.append((qu.scale, qu.zero_point, qv.scale, qv.zero_point))
    return container.serialize(codes, h, w, config.patch_size, quant=quant)


def svd_decode(data: bytes) -> np.ndarray:
    pairs, info = container.deserialize(data)
    if info.magic != container.MAGIC_SVD:
        raise container.ContainerError("magic", "bad magic: expected a QSV1 container")
    products = []
    for (uc, vc), comp in zip(pairs, info.components):
        us, uz, vs, vz = comp.quant
        u = dequantize(QuantizedFactor(uc, us, uz))
        v = dequantize(QuantizedFactor(vc, vs, vz))
        products.append(u @ v.T)
    return synthesise(products, info.height, info.width, info.patch)
