"""Read and write 8-bit RGB images as PNG (via Pillow) or binary PPM."""
from __future__ import annotations

import os
import re

import numpy as np

from .pipeline import as_rgb

_PPM_HEADER = re.compile(rb"P6\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s+"
                         rb"(?:#[^\n]*\n\s*)*(\d+)\s")


def _is_ppm(path) -> bool:
    return os.fspath(path).lower().endswith((".ppm", ".pnm"))


def decode_ppm(data: bytes) -> np.ndarray:
    m = _PPM_HEADER.match(data)
    if m is None:
        raise ValueError("not a binary PPM (P6) file")
    w, h, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise ValueError(f"only 8-bit PPM is supported (maxval {maxval})")
    body = data[m.end():m.end() + w * h * 3]
    if len(body) != w * h * 3:
        raise ValueError("PPM pixel data is truncated")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3).copy()


def encode_ppm(img) -> bytes:
    a = as_rgb(img)
    return b"P6\n%d %d\n255\n" % (a.shape[1], a.shape[0]) + a.tobytes()


def read_image(path) -> np.ndarray:
    """Load an image as an ``H x W x 3`` uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] == b"P6":
        return decode_ppm(data)
    from PIL import Image
    import io

    with Image.open(io.BytesIO(data)) as im:
        if im.format != "PNG":
            raise ValueError(f"unsupported image format {im.format!r}; use PNG or PPM")
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def write_image(path, img) -> None:
    a = as_rgb(img)
    if _is_ppm(path):
        with open(path, "wb") as fh:
            fh.write(encode_ppm(a))
        return
    from PIL import Image

    Image.fromarray(a, "RGB").save(path, format="PNG")
