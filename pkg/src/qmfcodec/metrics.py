"""PSNR and SSIM between 8-bit RGB images."""
from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import correlate1d

from .pipeline import as_rgb

__all__ = ["mse", "psnr", "ssim", "luma", "gaussian_window"]

WINDOW = 11
SIGMA = 1.5
K1, K2 = 0.01, 0.03
PEAK = 255.0


def _pair(a, b):
    a, b = as_rgb(a), as_rgb(b)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def mse(a, b) -> float:
    a, b = _pair(a, b)
    d = a.astype(np.float64) - b.astype(np.float64)
    return float(np.mean(d * d))


def psnr(a, b) -> float:
    """PSNR in dB over all pixels and channels; ``inf`` for identical images."""
    err = mse(a, b)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / err)


def luma(img) -> np.ndarray:
    rgb = as_rgb(img).astype(np.float64)
    return rgb @ np.array([0.299, 0.587, 0.114])


def gaussian_window(size: int = WINDOW, sigma: float = SIGMA) -> np.ndarray:
    """Normalised 1-D Gaussian taps; the 2-D window is its outer product."""
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def _filter(img, g):
    # separable 'valid' correlation
    half = len(g) // 2
    out = correlate1d(correlate1d(img, g, axis=0, mode="constant"), g, axis=1, mode="constant")
    return out[half:img.shape[0] - half, half:img.shape[1] - half]


def ssim(a, b) -> float:
    """Mean SSIM of the BT.601 luma planes.

    Single scale, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, L=255,
    statistics taken only where the window fits inside the image.
    """
    a, b = _pair(a, b)
    if min(a.shape[:2]) < WINDOW:
        raise ValueError(f"images must be at least {WINDOW}x{WINDOW} for SSIM")
    if np.array_equal(a, b):
        return 1.0
    x, y = luma(a), luma(b)
    g = gaussian_window()
    c1, c2 = (K1 * PEAK) ** 2, (K2 * PEAK) ** 2
    mx, my = _filter(x, g), _filter(y, g)
    sxx = _filter(x * x, g) - mx * mx
    syy = _filter(y * y, g) - my * my
    sxy = _filter(x * y, g) - mx * my
    num = (2 * mx * my + c1) * (2 * sxy + c2)
    den = (mx * mx + my * my + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))
