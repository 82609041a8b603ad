"""Image-domain transforms shared by the QMF codec and the SVD baseline.

Colour conversion uses the JFIF full-range BT.601 matrices. Chroma is
average-pooled 2x2 on encode and replicated nearest-neighbour on decode.
Planes are split into non-overlapping ``p x p`` patches after reflect padding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import round_half_away
from .linalg import as_matrix

__all__ = [
    "PlaneSet",
    "PatchMatrix",
    "as_rgb",
    "rgb_to_ycbcr",
    "ycbcr_to_rgb",
    "chroma_downsample",
    "chroma_upsample",
    "reflect_pad",
    "patchify",
    "depatchify",
    "image_to_planes",
    "planes_to_image",
]

_FWD = np.array([
    [0.299, 0.587, 0.114],
    [-0.168736, -0.331264, 0.5],
    [0.5, -0.418688, -0.081312],
])


@dataclass(frozen=True)
class PlaneSet:
    """Luma and chroma planes plus the size of the source image.

    Chroma planes are either full size or ``ceil(H/2) x ceil(W/2)``.
    """

    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray
    original_height: int
    original_width: int


@dataclass(frozen=True)
class PatchMatrix:
    matrix: np.ndarray
    padded_height: int
    padded_width: int
    plane_height: int
    plane_width: int
    patch: int


def as_rgb(img) -> np.ndarray:
    a = np.asarray(img)
    if a.ndim != 3 or a.shape[2] != 3:
        raise ValueError(f"expected an H x W x 3 image, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError("image must be at least 1 x 1")
    if a.dtype != np.uint8:
        if not np.issubdtype(a.dtype, np.integer) or a.min() < 0 or a.max() > 255:
            raise ValueError("image samples must be 8-bit unsigned integers")
        a = a.astype(np.uint8)
    return a


def rgb_to_ycbcr(img) -> PlaneSet:
    """Full-size Y, Cb, Cr planes in [0, 255] (real valued)."""
    rgb = as_rgb(img).astype(np.float64)
    ycc = rgb @ _FWD.T
    ycc[..., 1:] += 128.0
    np.clip(ycc, 0.0, 255.0, out=ycc)
    h, w = rgb.shape[:2]
    return PlaneSet(ycc[..., 0].copy(), ycc[..., 1].copy(), ycc[..., 2].copy(), h, w)


def ycbcr_to_rgb(planes: PlaneSet) -> np.ndarray:
    """Inverse colour transform; planes must already be full size."""
    y, cb, cr = planes.y, planes.cb - 128.0, planes.cr - 128.0
    if not (y.shape == cb.shape == cr.shape):
        raise ValueError("ycbcr_to_rgb needs full-size chroma planes")
    rgb = np.stack([
        y + 1.402 * cr,
        y - 0.344136 * cb - 0.714136 * cr,
        y + 1.772 * cb,
    ], axis=-1)
    return np.clip(round_half_away(rgb), 0, 255).astype(np.uint8)


def reflect_pad(plane: np.ndarray, pad_h: int, pad_w: int) -> np.ndarray:
    """Pad at the bottom/right by mirroring without repeating the edge sample.

    An axis shorter than its pad + 1 is edge-replicated instead.
    """
    out = plane
    for axis, pad in ((0, pad_h), (1, pad_w)):
        if pad <= 0:
            continue
        widths = [(0, 0), (0, 0)]
        widths[axis] = (0, pad)
        mode = "reflect" if out.shape[axis] > pad else "edge"
        out = np.pad(out, widths, mode=mode)
    return out


def chroma_downsample(plane) -> np.ndarray:
    p = as_matrix(plane, "plane")
    h, w = p.shape
    p = reflect_pad(p, h % 2, w % 2)
    return p.reshape(p.shape[0] // 2, 2, p.shape[1] // 2, 2).mean(axis=(1, 3))


def chroma_upsample(plane, target_h: int, target_w: int) -> np.ndarray:
    p = as_matrix(plane, "plane", finite=False)
    if p.shape != (-(-target_h // 2), -(-target_w // 2)):
        raise ValueError(f"plane {p.shape} cannot be upsampled to {target_h}x{target_w}")
    return np.repeat(np.repeat(p, 2, axis=0), 2, axis=1)[:target_h, :target_w]


def patchify(plane, patch: int = 8) -> PatchMatrix:
    """Rows of the result are row-major flattened patches, in raster order."""
    if patch < 1:
        raise ValueError("patch size must be >= 1")
    p = as_matrix(plane, "plane", finite=False)
    h, w = p.shape
    ph, pw = -(-h // patch) * patch, -(-w // patch) * patch
    padded = reflect_pad(p, ph - h, pw - w)
    blocks = padded.reshape(ph // patch, patch, pw // patch, patch).transpose(0, 2, 1, 3)
    return PatchMatrix(blocks.reshape(-1, patch * patch).copy(), ph, pw, h, w, patch)


def depatchify(pm: PatchMatrix) -> np.ndarray:
    p = pm.patch
    ok = (p >= 1 and pm.padded_height % p == 0 and pm.padded_width % p == 0
          and 0 < pm.plane_height <= pm.padded_height
          and 0 < pm.plane_width <= pm.padded_width
          and pm.matrix.shape == ((pm.padded_height // p) * (pm.padded_width // p), p * p))
    if not ok:
        raise ValueError("inconsistent patch matrix metadata")
    gh, gw = pm.padded_height // p, pm.padded_width // p
    plane = pm.matrix.reshape(gh, gw, p, p).transpose(0, 2, 1, 3).reshape(gh * p, gw * p)
    return plane[:pm.plane_height, :pm.plane_width].copy()


def image_to_planes(img) -> PlaneSet:
    """Colour transform followed by chroma subsampling."""
    full = rgb_to_ycbcr(img)
    return PlaneSet(full.y, chroma_downsample(full.cb), chroma_downsample(full.cr),
                    full.original_height, full.original_width)


def planes_to_image(planes: PlaneSet) -> np.ndarray:
    """Clamp reconstructed planes, upsample chroma and convert back to RGB."""
    h, w = planes.original_height, planes.original_width
    y = np.clip(planes.y, 0.0, 255.0)
    cb = chroma_upsample(np.clip(planes.cb, 0.0, 255.0), h, w)
    cr = chroma_upsample(np.clip(planes.cr, 0.0, 255.0), h, w)
    return ycbcr_to_rgb(PlaneSet(y, cb, cr, h, w))
