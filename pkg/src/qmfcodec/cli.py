"""``qmf`` command line: encode, decode, info, bench.

Exit codes: 0 success, 1 runtime/I-O/parse failure, 2 bad usage. Every
failure prints one line starting with ``qmf: error:`` on stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench, container
from .baseline import svd_encode
from .codec import decode_any, encode
from .imageio import read_image, write_image
from .solver import Bounds, QmfConfig

PROG = "qmf"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{PROG}: error: {message}\n")


def _quality(text):
    q = float(text)
    if not 0.0 <= q <= 1.0:
        raise argparse.ArgumentTypeError(f"quality {text} outside [0, 1]")
    return q


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be >= 1")
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"{text} must be >= 0")
    return v


def _bounds(text):
    try:
        return Bounds.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _patch(text):
    v = _positive(text)
    if v > 255:
        raise argparse.ArgumentTypeError("patch size must be <= 255")
    return v


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _qualities(text):
    qs = _floats(text)
    if not qs or any(not 0.0 <= q <= 1.0 for q in qs):
        raise argparse.ArgumentTypeError("qualities must be a non-empty list in [0, 1]")
    return qs


def _codecs(text):
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [n for n in names if n not in bench.CODECS]
    if not names or bad:
        raise argparse.ArgumentTypeError(f"unknown codec(s): {', '.join(bad) or '(none)'}")
    return names


def _add_config_flags(p):
    rate = p.add_mutually_exclusive_group()
    rate.add_argument("--quality", type=_quality, help="quality in [0, 1] (default 0.1)")
    rate.add_argument("--rank", type=_positive, help="explicit factorization rank")
    p.add_argument("--bounds", type=_bounds, default=Bounds(), metavar="A,B",
                   help="integer factor bounds (default -16,15)")
    p.add_argument("--iterations", type=_nonneg, default=10, metavar="K",
                   help="BCD sweeps (default 10)")
    p.add_argument("--patch", type=_patch, default=8, metavar="P", help="patch size (default 8)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Lossy image codec based on integer low-rank factorization.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", help="compress a PNG/PPM image")
    p.add_argument("input")
    p.add_argument("output")
    _add_config_flags(p)
    p.add_argument("--codec", choices=sorted(bench.CODECS), default="qmf")

    p = sub.add_parser("decode", help="decompress a .qmf/.qsv container to PNG/PPM")
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("info", help="print container header fields")
    p.add_argument("path")

    p = sub.add_parser("bench", help="rate-distortion sweep over an image directory")
    p.add_argument("--dataset", required=True)
    p.add_argument("--codecs", type=_codecs, default=["qmf", "svd"])
    p.add_argument("--qualities", type=_qualities,
                   default=[k / 64 for k in range(1, 25)])
    p.add_argument("--grid", type=_floats,
                   default=[round(0.05 + 0.025 * i, 4) for i in range(19)])
    p.add_argument("--out", required=True, help="curve CSV path; raw points go to <stem>_raw.csv")
    p.add_argument("--raw-out", help="raw points CSV path")
    p.add_argument("--gnuplot", help="also write a gnuplot script to this path")
    p.add_argument("--repeats", type=_positive, default=3, help="timing repetitions (median)")
    p.add_argument("--no-timing", action="store_true",
                   help="skip timing so the raw CSV is byte-reproducible")
    p.add_argument("--bounds", type=_bounds, default=Bounds(), metavar="A,B")
    p.add_argument("--iterations", type=_nonneg, default=10, metavar="K")
    p.add_argument("--patch", type=_patch, default=8, metavar="P")
    return parser


def _config(args) -> QmfConfig:
    return QmfConfig(quality=getattr(args, "quality", None), rank=getattr(args, "rank", None),
                     bounds=args.bounds, iterations=args.iterations, patch_size=args.patch)


def cmd_encode(args) -> int:
    cfg = _config(args)
    img = read_image(args.input)
    data = (svd_encode if args.codec == "svd" else encode)(img, cfg)
    Path(args.output).write_bytes(data)
    info = container.read_info(data)
    ranks = ",".join(str(c.rank) for c in info.components)
    print(f"{args.output}: {info.width}x{info.height} codec={args.codec} ranks={ranks} "
          f"bytes={len(data)} bpp={info.bpp:.4f}")
    return 0


def cmd_decode(args) -> int:
    data = Path(args.input).read_bytes()
    write_image(args.output, decode_any(data))
    return 0


def cmd_info(args) -> int:
    data = Path(args.path).read_bytes()
    info = container.read_info(data)
    print(f"format: {info.magic.decode()}")
    print(f"dimensions: {info.width}x{info.height}")
    print(f"patch: {info.patch}")
    if info.magic == container.MAGIC_QMF:
        print(f"bounds: [{info.bounds.alpha},{info.bounds.beta}]")
    for name, c in zip(container.COMPONENTS, info.components):
        line = f"{name}: rank={c.rank} M={c.m} N={c.n} U_bytes={c.u_bytes} V_bytes={c.v_bytes}"
        if c.quant is not None:
            line += " u_scale={:.6g} u_zero={:.6g} v_scale={:.6g} v_zero={:.6g}".format(*c.quant)
        print(line)
    print(f"header_bytes: {info.header_size}")
    print(f"total_bytes: {info.total_size}")
    print(f"bpp: {info.bpp:.6f}")
    return 0


def cmd_bench(args) -> int:
    cfg = QmfConfig(bounds=args.bounds, iterations=args.iterations, patch_size=args.patch)
    report = bench.SweepReport()
    images = bench.load_dataset(args.dataset, report)
    for name, reason in report.skipped.items():
        print(f"warning: skipped {name}: {reason}", file=sys.stderr)
    points, curves = [], []
    for codec in args.codecs:
        pts = bench.measure_points(images, codec, args.qualities, cfg, repeats=args.repeats,
                                   timing=not args.no_timing)
        points.extend(pts)
        curves.append(bench.build_curve(pts, args.grid))
    out = Path(args.out)
    raw = Path(args.raw_out) if args.raw_out else out.with_name(out.stem + "_raw.csv")
    out.write_text(bench.curve_csv(curves))
    raw.write_text(bench.raw_csv(points))
    if args.gnuplot:
        Path(args.gnuplot).write_text(bench.gnuplot_script(str(out), args.codecs))
    print(f"{len(images)} images, {len(points)} points -> {out}, {raw}")
    return 0


COMMANDS = {"encode": cmd_encode, "decode": cmd_decode, "info": cmd_info, "bench": cmd_bench}


def _glue_bounds(argv):
    # "--bounds -16,15" would otherwise be read as an unknown option
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--bounds":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--bounds={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format=f"{PROG}: %(levelname)s: %(message)s")
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_bounds(argv))
    try:
        return COMMANDS[args.command](args)
    except (OSError, ValueError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"{PROG}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
