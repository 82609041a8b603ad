"""Rate-distortion sweeps over a directory of images.

Each image is encoded at every requested quality, decoded, and scored. The
per-image (bpp, PSNR/SSIM) samples are linearly interpolated onto a fixed
bpp grid, never extrapolated, and then averaged across images.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import codec as qmf_codec
from .baseline import svd_decode, svd_encode
from .container import compressed_bpp
from .imageio import read_image
from .metrics import psnr, ssim
from .solver import QmfConfig

log = logging.getLogger(__name__)

RAW_FIELDS = ["image", "codec", "quality", "bpp", "psnr_db", "ssim", "encode_ms", "decode_ms"]
CURVE_FIELDS = ["codec", "bpp", "psnr_mean", "psnr_se", "ssim_mean", "ssim_se", "n_images"]

CODECS: Dict[str, tuple] = {
    "qmf": (qmf_codec.encode, qmf_codec.decode),
    "svd": (svd_encode, svd_decode),
}


@dataclass(frozen=True)
class RdPoint:
    image: str
    codec: str
    quality: float
    bpp: float
    psnr_db: float
    ssim: float
    encode_ms: float = math.nan
    decode_ms: float = math.nan


@dataclass
class RdCurve:
    codec: str
    grid: np.ndarray
    psnr_mean: np.ndarray
    psnr_se: np.ndarray
    ssim_mean: np.ndarray
    ssim_se: np.ndarray
    n_images: np.ndarray
    per_image: Dict[str, Dict[str, np.ndarray]] = field(default_factory=dict)

    def covered(self) -> np.ndarray:
        return self.n_images > 0


@dataclass
class SweepReport:
    images: List[str] = field(default_factory=list)
    skipped: Dict[str, str] = field(default_factory=dict)


def default_threads() -> int:
    env = os.environ.get("QMF_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(4, os.cpu_count() or 1))


def load_dataset(dataset_dir, report: Optional[SweepReport] = None) -> Dict[str, np.ndarray]:
    """Read every PNG/PPM in a directory; unreadable files are skipped and reported."""
    report = report if report is not None else SweepReport()
    root = Path(dataset_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset directory {root} does not exist")
    images = {}
    for path in sorted(root.iterdir()):
        if path.suffix.lower() not in (".png", ".ppm", ".pnm"):
            continue
        try:
            images[path.stem] = read_image(path)
        except (OSError, ValueError) as exc:
            log.warning("skipping %s: %s", path.name, exc)
            report.skipped[path.name] = str(exc)
    if not images:
        raise ValueError(f"no readable images in {root}")
    report.images = sorted(images)
    return images


def _timed(fn, arg, repeats):
    times, out = [], None
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        out = fn(arg)
        times.append((time.perf_counter() - t0) * 1e3)
    return out, statistics.median(times)


def measure(name: str, img: np.ndarray, codec: str, quality: float,
            config: QmfConfig = QmfConfig(), repeats: int = 1, timing: bool = True,
            label: Optional[str] = None) -> RdPoint:
    encode, decode = CODECS[codec]
    cfg = replace(config, quality=quality, rank=None)
    reps = repeats if timing else 1
    data, enc_ms = _timed(lambda im: encode(im, cfg), img, reps)
    out, dec_ms = _timed(decode, data, reps)
    if not timing:
        enc_ms = dec_ms = math.nan
    return RdPoint(name, label or codec, float(quality),
                   compressed_bpp(data, img.shape[0], img.shape[1]),
                   psnr(img, out), ssim(img, out), enc_ms, dec_ms)


def measure_points(images: Dict[str, np.ndarray], codec: str, qualities: Sequence[float],
                   config: QmfConfig = QmfConfig(), *, repeats: int = 1, timing: bool = True,
                   threads: Optional[int] = None, label: Optional[str] = None) -> List[RdPoint]:
    """All image x quality points, ordered by image name then quality."""
    if not qualities:
        raise ValueError("at least one quality is required")
    if codec not in CODECS:
        raise ValueError(f"unknown codec {codec!r}")
    jobs = [(n, q) for n in sorted(images) for q in qualities]
    run = lambda job: measure(job[0], images[job[0]], codec, job[1], config,  # noqa: E731
                              repeats, timing, label)
    workers = threads or default_threads()
    if workers == 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))


def interpolate(bpp, values, grid) -> np.ndarray:
    """Piecewise-linear interpolation onto ``grid``; NaN outside the sampled range."""
    bpp = np.asarray(bpp, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    xs, inv = np.unique(bpp, return_inverse=True)
    ys = np.bincount(inv, weights=values) / np.bincount(inv)
    out = np.interp(grid, xs, ys)
    out[(grid < xs[0]) | (grid > xs[-1])] = np.nan
    return out


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1 or g.size == 0 or np.any(np.diff(g) <= 0):
        raise ValueError("bpp grid must be a non-empty, strictly increasing list")
    return g


def _se(col: np.ndarray) -> float:
    if col.size < 2:
        return math.nan
    return float(np.std(col, ddof=1) / math.sqrt(col.size))


def build_curve(points: Sequence[RdPoint], grid, codec: Optional[str] = None) -> RdCurve:
    g = _check_grid(grid)
    if codec is not None:
        points = [p for p in points if p.codec == codec]
    if not points:
        raise ValueError("no rate-distortion points to aggregate")
    codec = points[0].codec
    per_image = {}
    for name in sorted({p.image for p in points}):
        pts = [p for p in points if p.image == name]
        bpp = [p.bpp for p in pts]
        per_image[name] = {
            "psnr": interpolate(bpp, [p.psnr_db for p in pts], g),
            "ssim": interpolate(bpp, [p.ssim for p in pts], g),
        }
    ps = np.array([v["psnr"] for v in per_image.values()])
    ss = np.array([v["ssim"] for v in per_image.values()])
    n = np.sum(~np.isnan(ps), axis=0)
    stats = {k: np.full(g.size, np.nan) for k in ("pm", "pse", "sm", "sse")}
    for j in range(g.size):
        if n[j] == 0:
            continue
        pc, sc = ps[:, j][~np.isnan(ps[:, j])], ss[:, j][~np.isnan(ss[:, j])]
        stats["pm"][j], stats["pse"][j] = float(np.mean(pc)), _se(pc)
        stats["sm"][j], stats["sse"][j] = float(np.mean(sc)), _se(sc)
    return RdCurve(codec, g, stats["pm"], stats["pse"], stats["sm"], stats["sse"], n, per_image)


def rd_sweep(dataset_dir, codec: str, qualities: Sequence[float], grid,
             config: QmfConfig = QmfConfig(), *, repeats: int = 3, timing: bool = True,
             threads: Optional[int] = None, label: Optional[str] = None):
    """Run one codec over a dataset directory.

    Returns ``(curve, points, report)``.
    """
    report = SweepReport()
    images = load_dataset(dataset_dir, report)
    points = measure_points(images, codec, qualities, config, repeats=repeats,
                            timing=timing, threads=threads, label=label)
    return build_curve(points, grid), points, report


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return ""
    if math.isinf(v):
        return "inf"
    return f"{v:.6f}"


def raw_csv(points: Sequence[RdPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RAW_FIELDS)
    for p in sorted(points, key=lambda p: (p.codec, p.image, p.quality)):
        w.writerow([_fmt(getattr(p, f)) for f in RAW_FIELDS])
    return buf.getvalue()


def curve_csv(curves: Sequence[RdCurve]) -> str:
    """One row per covered grid point per codec; uncovered points are omitted."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_FIELDS)
    for c in curves:
        for j in np.flatnonzero(c.covered()):
            w.writerow([c.codec, _fmt(c.grid[j]), _fmt(c.psnr_mean[j]), _fmt(c.psnr_se[j]),
                        _fmt(c.ssim_mean[j]), _fmt(c.ssim_se[j]), _fmt(c.n_images[j])])
    return buf.getvalue()


def gnuplot_script(curve_path: str, codecs: Sequence[str], metric: str = "psnr_mean",
                   output: str = "rd.png") -> str:
    """Gnuplot commands plotting ``metric`` against bpp for each codec."""
    col = CURVE_FIELDS.index(metric) + 1
    ylabel = "PSNR (dB)" if metric.startswith("psnr") else "SSIM"
    plots = ", \\\n     ".join(
        f"'{curve_path}' using (strcol(1) eq '{c}' ? $2 : 1/0):{col} "
        f"with linespoints title '{c}'" for c in codecs)
    return "\n".join([
        "set datafile separator ','",
        "set key bottom right",
        "set terminal pngcairo size 800,600",
        f"set output '{output}'",
        "set xlabel 'bpp'",
        f"set ylabel '{ylabel}'",
        "set grid",
        f"plot {plots}",
        "",
    ])
