"""Binary container for factorized images.

Layout (all integers little-endian)::

    magic        4 bytes   b"QMF1" (integer factors) or b"QSV1" (quantized SVD)
    version      u8        1
    flags        u8        0
    height       u32
    width        u32
    patch        u8
    alpha, beta  i8, i8
    3 x component descriptor, in the order Y, Cb, Cr:
        rank     u16
        M, N     u32, u32
        [QSV1 only] u_scale, u_zero, v_scale, v_zero   f64
        rank x u32 compressed lengths of the U columns
        rank x u32 compressed lengths of the V columns
    payload      the zlib streams, in descriptor order

Every column is compressed on its own at level 9. QMF1 columns hold int8
values, QSV1 columns hold uint8 quantization codes.
"""
from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .solver import Bounds, IntFactorPair

__all__ = [
    "MAGIC_QMF",
    "MAGIC_SVD",
    "ContainerError",
    "ComponentInfo",
    "ContainerInfo",
    "serialize",
    "deserialize",
    "read_info",
    "compressed_bpp",
    "plane_shapes",
]

MAGIC_QMF = b"QMF1"
MAGIC_SVD = b"QSV1"
VERSION = 1
LEVEL = 9
COMPONENTS = ("Y", "Cb", "Cr")

_FIXED = struct.Struct("<4sBBIIBbb")
_COMP = struct.Struct("<HII")
_QUANT = struct.Struct("<dddd")


class ContainerError(ValueError):
    """Malformed container. ``field`` names the part that failed to parse."""

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class ComponentInfo:
    rank: int
    m: int
    n: int
    u_lengths: tuple
    v_lengths: tuple
    quant: Optional[tuple] = None

    @property
    def u_bytes(self) -> int:
        return sum(self.u_lengths)

    @property
    def v_bytes(self) -> int:
        return sum(self.v_lengths)


@dataclass(frozen=True)
class ContainerInfo:
    magic: bytes
    height: int
    width: int
    patch: int
    bounds: Bounds
    components: tuple
    header_size: int
    total_size: int

    @property
    def bpp(self) -> float:
        return compressed_bpp(self.total_size, self.height, self.width)


def plane_shapes(height: int, width: int):
    """Plane sizes (luma, chroma, chroma) for an image of the given size."""
    ch, cw = -(-height // 2), -(-width // 2)
    return ((height, width), (ch, cw), (ch, cw))


def _patch_rows(shape, patch):
    return (-(-shape[0] // patch)) * (-(-shape[1] // patch))


def compressed_bpp(data, height: int, width: int) -> float:
    """Bits per pixel of a container (bytes object or byte count)."""
    if height < 1 or width < 1:
        raise ValueError("image dimensions must be positive")
    size = data if isinstance(data, int) else len(data)
    return 8.0 * size / (height * width)


def _columns(a: np.ndarray, dtype) -> list:
    cols = np.ascontiguousarray(a.T.astype(dtype))
    return [zlib.compress(c.tobytes(), LEVEL) for c in cols]


def serialize(factors: Sequence, height: int, width: int, patch: int,
              quant: Optional[Sequence] = None) -> bytes:
    """Pack three factor pairs into a container.

    ``factors`` are :class:`IntFactorPair` objects for QMF1. For QSV1 pass
    ``(u_codes, v_codes)`` uint8 arrays and, in ``quant``, one
    ``(u_scale, u_zero, v_scale, v_zero)`` tuple per component.
    """
    if len(factors) != 3:
        raise ValueError("exactly three components (Y, Cb, Cr) are required")
    if quant is None:
        bounds = factors[0].bounds
        if any(f.bounds != bounds for f in factors):
            raise ValueError("all components must share the same bounds")
        magic, alpha, beta, dtype = MAGIC_QMF, bounds.alpha, bounds.beta, np.int8
        pairs = [(f.u, f.v) for f in factors]
    else:
        magic, alpha, beta, dtype = MAGIC_SVD, -128, 127, np.uint8
        pairs = list(factors)
        if len(quant) != 3:
            raise ValueError("one quantization tuple per component is required")
    if not 1 <= patch <= 255:
        raise ValueError("patch size must fit in one byte")

    header = [_FIXED.pack(magic, VERSION, 0, height, width, patch, alpha, beta)]
    payload = []
    for i, (u, v) in enumerate(pairs):
        u, v = np.asarray(u), np.asarray(v)
        lo, hi = (-128, 127) if dtype is np.int8 else (0, 255)
        if u.size and (u.min() < lo or u.max() > hi or v.min() < lo or v.max() > hi):
            raise ValueError(f"component {COMPONENTS[i]} has elements outside the byte range")
        if u.shape[1] != v.shape[1] or u.shape[1] > 0xFFFF:
            raise ValueError(f"component {COMPONENTS[i]} has an invalid rank")
        ucols, vcols = _columns(u, dtype), _columns(v, dtype)
        header.append(_COMP.pack(u.shape[1], u.shape[0], v.shape[0]))
        if quant is not None:
            header.append(_QUANT.pack(*(float(q) for q in quant[i])))
        header.append(struct.pack(f"<{2 * len(ucols)}I", *(len(c) for c in ucols + vcols)))
        payload.extend(ucols + vcols)
    return b"".join(header + payload)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, st: struct.Struct, field: str):
        if self.pos + st.size > len(self.data):
            raise ContainerError(field, f"truncated header while reading {field}")
        out = st.unpack_from(self.data, self.pos)
        self.pos += st.size
        return out


def _parse(data: bytes) -> ContainerInfo:
    data = bytes(data)
    if len(data) < 4 or data[:4] not in (MAGIC_QMF, MAGIC_SVD):
        raise ContainerError("magic", "bad magic: not a QMF1/QSV1 container")
    rd = _Reader(data)
    magic, version, flags, height, width, patch, alpha, beta = rd.take(_FIXED, "fixed header")
    if version != VERSION:
        raise ContainerError("version", f"unsupported version {version}")
    if flags != 0:
        raise ContainerError("flags", f"unknown flags {flags:#04x}")
    if height < 1 or width < 1:
        raise ContainerError("dimensions", f"invalid image size {height}x{width}")
    if patch < 1:
        raise ContainerError("patch", "patch size must be >= 1")
    if alpha > beta:
        raise ContainerError("bounds", f"invalid bounds [{alpha}, {beta}]")
    if magic == MAGIC_SVD and (alpha, beta) != (-128, 127):
        raise ContainerError("bounds", "QSV1 containers carry bounds [-128, 127]")

    comps = []
    for name, shape in zip(COMPONENTS, plane_shapes(height, width)):
        rank, m, n = rd.take(_COMP, f"{name} descriptor")
        if m != _patch_rows(shape, patch):
            raise ContainerError(f"{name}.M", f"{name}: M={m} does not match a "
                                 f"{shape[0]}x{shape[1]} plane with patch {patch}")
        if n != patch * patch:
            raise ContainerError(f"{name}.N", f"{name}: N={n} but patch {patch} needs {patch * patch}")
        if not 1 <= rank <= min(m, n):
            raise ContainerError(f"{name}.rank", f"{name}: rank {rank} out of range")
        q = None
        if magic == MAGIC_SVD:
            q = rd.take(_QUANT, f"{name} quantization")
            if not all(np.isfinite(q)) or q[0] < 0 or q[2] < 0:
                raise ContainerError(f"{name}.quant", f"{name}: invalid quantization parameters")
        lengths = rd.take(struct.Struct(f"<{2 * rank}I"), f"{name} stream lengths")
        comps.append(ComponentInfo(rank, m, n, lengths[:rank], lengths[rank:], q))

    declared = sum(c.u_bytes + c.v_bytes for c in comps)
    available = len(data) - rd.pos
    if available < declared:
        raise ContainerError("payload", f"truncated stream: {available} of {declared} payload bytes")
    if available > declared:
        raise ContainerError("payload", f"length mismatch: {available - declared} trailing bytes")
    bounds = Bounds(alpha, beta)
    return ContainerInfo(magic, height, width, patch, bounds, tuple(comps), rd.pos, len(data))


def read_info(data: bytes) -> ContainerInfo:
    """Parse and validate the header without decompressing the payload."""
    return _parse(data)


def _inflate(data, pos, length, expected, dtype, field):
    try:
        raw = zlib.decompress(data[pos:pos + length])
    except zlib.error as exc:
        raise ContainerError(field, f"decompression failed in {field}: {exc}") from None
    if len(raw) != expected:
        raise ContainerError(field, f"length mismatch in {field}: {len(raw)} bytes, expected {expected}")
    return np.frombuffer(raw, dtype=dtype)


def deserialize(data: bytes):
    """Inverse of :func:`serialize`.

    Returns ``(factors, info)``. For QMF1 ``factors`` is a list of
    :class:`IntFactorPair`; for QSV1 it is a list of ``(u_codes, v_codes)``
    uint8 arrays, with the quantization parameters in ``info``.
    """
    data = bytes(data)
    info = _parse(data)
    dtype = np.int8 if info.magic == MAGIC_QMF else np.uint8
    pos = info.header_size
    out = []
    for name, c in zip(COMPONENTS, info.components):
        mats = []
        for side, rows, lengths in (("U", c.m, c.u_lengths), ("V", c.n, c.v_lengths)):
            cols = []
            for j, length in enumerate(lengths):
                cols.append(_inflate(data, pos, length, rows, dtype, f"{name}.{side}[{j}]"))
                pos += length
            mats.append(np.stack(cols, axis=1))
        if info.magic == MAGIC_QMF:
            try:
                out.append(IntFactorPair(mats[0], mats[1], info.bounds))
            except ValueError as exc:
                raise ContainerError(f"{name}.bounds", f"{name}: {exc}") from None
        else:
            out.append((mats[0], mats[1]))
    return out, info
