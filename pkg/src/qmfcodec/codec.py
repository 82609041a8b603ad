"""QMF image encoder and decoder."""
from __future__ import annotations

import numpy as np

from . import container
from .pipeline import PatchMatrix, PlaneSet, depatchify, image_to_planes, patchify, planes_to_image
from .solver import QmfConfig, bcd_solve

__all__ = ["analyse", "synthesise", "encode", "decode", "decode_any"]


def analyse(img, patch: int):
    """Colour-convert, subsample and patchify an image.

    Returns ``(patch_matrices, height, width)`` with matrices ordered Y, Cb, Cr.
    """
    planes = image_to_planes(img)
    pms = [patchify(p, patch) for p in (planes.y, planes.cb, planes.cr)]
    return pms, planes.original_height, planes.original_width


def synthesise(products, height: int, width: int, patch: int) -> np.ndarray:
    """Turn reconstructed patch matrices back into an RGB image."""
    planes = []
    for prod, shape in zip(products, container.plane_shapes(height, width)):
        ph, pw = (-(-shape[0] // patch) * patch, -(-shape[1] // patch) * patch)
        planes.append(depatchify(PatchMatrix(prod, ph, pw, shape[0], shape[1], patch)))
    return planes_to_image(PlaneSet(*planes, height, width))


def encode(img, config: QmfConfig = QmfConfig()) -> bytes:
    pms, h, w = analyse(img, config.patch_size)
    factors = []
    for pm in pms:
        m, n = pm.matrix.shape
        r = config.rank_for(m, n)
        factors.append(bcd_solve(pm.matrix, r, config.bounds, config.iterations))
    return container.serialize(factors, h, w, config.patch_size)


def decode(data: bytes) -> np.ndarray:
    factors, info = container.deserialize(data)
    if info.magic != container.MAGIC_QMF:
        raise container.ContainerError("magic", "bad magic: expected a QMF1 container")
    return synthesise([f.product() for f in factors], info.height, info.width, info.patch)


def decode_any(data: bytes) -> np.ndarray:
    """Decode either container kind, dispatching on the magic bytes."""
    if bytes(data[:4]) == container.MAGIC_SVD:
        from .baseline import svd_decode

        return svd_decode(data)
    return decode(data)
