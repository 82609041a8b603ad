"""Lossy image codec built on low-rank factorization with bounded integer factors."""
from .baseline import svd_decode, svd_encode
from .codec import decode, decode_any, encode
from .container import ContainerError, compressed_bpp, deserialize, read_info, serialize
from .kernels import BACKEND
from .metrics import psnr, ssim
from .solver import Bounds, IntFactorPair, QmfConfig, bcd_solve, rank_from_quality

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Bounds",
    "ContainerError",
    "IntFactorPair",
    "QmfConfig",
    "bcd_solve",
    "compressed_bpp",
    "decode",
    "decode_any",
    "deserialize",
    "encode",
    "psnr",
    "rank_from_quality",
    "read_info",
    "serialize",
    "ssim",
    "svd_decode",
    "svd_encode",
]
