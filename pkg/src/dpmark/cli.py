"""Command-line interface.

Exit status: 0 success, 1 usage error, 2 data error. Messages go to
stderr; data goes to files or stdout.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench, watermark as wm
from .attacks import parse_attack
from .partition import (
    SINGULAR_T,
    BinaryWavelet,
    SingularMatrixError,
    SpatialScalability,
    TruncatedSvd,
    error_propagation,
    int_det,
    reconstruct,
    split,
)
from .pixelcore import PgmError, ber, binarize, bits_to_gray, format_db, read_pgm, write_pgm


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _err(msg):
    print(msg, file=sys.stderr)


def _params(args):
    if args.method == "dp":
        return wm.DpParams(args.M if args.M is not None else wm.DP_M, args.N if args.N is not None else wm.DP_N)
    if args.N is not None:
        raise UsageError("--N only applies to --method dp")
    return wm.NormalParams(args.M if args.M is not None else wm.NORMAL_M)


def cmd_embed(args):
    params = _params(args)
    cover = read_pgm(args.cover)
    logo = binarize(read_pgm(args.logo))
    marked, report = wm.embed(args.method, cover, logo, params)
    write_pgm(args.out, marked)
    _err(f"PSNR {format_db(report.psnr_db)} dB, {report.capacity_bits} payload symbols in {report.blocks_used} blocks")
    if args.report:
        Path(args.report).write_text(
            f"method = {args.method}\npsnr_db = {format_db(report.psnr_db)}\n"
            f"blocks_used = {report.blocks_used}\ncapacity_bits = {report.capacity_bits}\n"
        )
    return 0


def cmd_extract(args):
    params = _params(args)
    bits = wm.extract(args.method, read_pgm(args.image), params)
    write_pgm(args.out, bits_to_gray(bits))
    if args.truth:
        _err(f"BER {ber(binarize(read_pgm(args.truth)), bits):.2f}%")
    return 0


def cmd_attack(args):
    spec = parse_attack(args.attack)
    if spec.stochastic and spec.seed is None:
        if args.seed is None:
            raise UsageError(f"{spec.cli_name} attack needs --seed or seed= in the spec")
        spec = spec.with_seed(args.seed)
    write_pgm(args.out, spec.apply(read_pgm(args.image)))
    _err(f"applied {spec}")
    return 0


def cmd_calibrate(args):
    covers = [read_pgm(p) for p in sorted(Path(args.covers).glob("*.pgm"))]
    if not covers:
        raise ValueError(f"no PGM images in {args.covers}")
    logo = binarize(read_pgm(args.logo))
    params = wm.calibrate(covers, logo, args.target_psnr, args.method, ratio=args.ratio)
    got = wm.mean_psnr(covers, logo, args.method, params)
    if args.method == "dp":
        print(f"M = {params.M:.4f}\nN = {params.N:.4f}")
    else:
        print(f"M = {params.M:.4f}")
    print(f"mean_psnr_db = {got:.3f}")
    return 0


def cmd_partition(args):
    logo = binarize(read_pgm(args.logo))
    methods = [("spatial", SpatialScalability()), ("bwd", BinaryWavelet()), ("svd", TruncatedSvd(args.svd_rank))]
    print("method,alphabet_base,alphabet_enh,reversible,enh_propagation,base_propagation,mean_propagation")
    for name, method in methods:
        parts = split(logo, method)
        ok = (reconstruct(parts) == logo).all()
        prop = error_propagation(method, logo)
        base = "" if prop.base_mean is None else f"{prop.base_mean:.4f}"
        print(
            f"{name},{parts.alphabet_size_base},{parts.alphabet_size_enh},"
            f"{'pass' if ok else 'fail'},{prop.enhancement_mean:.4f},{base},{prop.overall_mean:.4f}"
        )
    try:
        BinaryWavelet(SINGULAR_T)
    except SingularMatrixError as exc:
        _err(f"candidate binary-wavelet T rejected: {exc}")
    else:  # pragma: no cover - SINGULAR_T is singular by construction
        _err(f"candidate binary-wavelet T accepted (det {int_det(SINGULAR_T)})")
    return 0


def cmd_bench(args):
    overrides = {"seed": args.seed, "workers": args.workers}
    for key in ("out_csv", "out_md", "out_jpeg_curve", "fig_dir"):
        value = getattr(args, key)
        # flags are relative to the working directory, not the config file
        overrides[key] = str(Path(value).resolve()) if value else None
    config = bench.load_config(args.config, overrides)
    records, errors = bench.run_suite(config)
    for name, msg in errors:
        _err(f"skipped {name}: {msg}")
    if config.out_csv is None:
        sys.stdout.buffer.write(bench.emit_csv(records))
    for path in bench.write_outputs(config, records):
        _err(f"wrote {path}")
    return 0


def build_parser():
    p = _Parser(prog="dpmark", description="Data-partitioned two-layer DCT image watermarking.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def strengths(sp):
        sp.add_argument("--method", choices=("dp", "normal"), default="dp")
        sp.add_argument("--M", type=float, help="base (dp) or single-layer strength")
        sp.add_argument("--N", type=float, help="enhancement strength (dp only)")

    e = sub.add_parser("embed", help="embed a logo into a cover image")
    e.add_argument("--cover", required=True)
    e.add_argument("--logo", required=True)
    strengths(e)
    e.add_argument("--out", required=True)
    e.add_argument("--report")
    e.set_defaults(func=cmd_embed)

    x = sub.add_parser("extract", help="blindly extract a logo")
    x.add_argument("--image", required=True)
    strengths(x)
    x.add_argument("--out", required=True)
    x.add_argument("--truth", help="original logo; prints the BER")
    x.set_defaults(func=cmd_extract)

    a = sub.add_parser("attack", help="apply one attack")
    a.add_argument("--image", required=True)
    a.add_argument("--attack", required=True, help="e.g. jpeg:qf=30, gauss:k=7,sigma=2.5, spnoise:pct=1")
    a.add_argument("--out", required=True)
    a.add_argument("--seed", type=int)
    a.set_defaults(func=cmd_attack)

    c = sub.add_parser("calibrate", help="find the strength reaching a target mean PSNR")
    c.add_argument("--covers", required=True, help="directory of PGM covers")
    c.add_argument("--logo", required=True)
    c.add_argument("--method", choices=("dp", "normal"), default="dp")
    c.add_argument("--target-psnr", type=float, required=True)
    c.add_argument("--ratio", type=float, default=wm.DP_RATIO, help="N/M for dp")
    c.set_defaults(func=cmd_calibrate)

    pa = sub.add_parser("partition-analyze", help="compare the three logo partitioning methods")
    pa.add_argument("--logo", required=True)
    pa.add_argument("--svd-rank", type=int, default=5)
    pa.set_defaults(func=cmd_partition)

    b = sub.add_parser("bench", help="run an attack suite over an image set")
    b.add_argument("--config", required=True)
    b.add_argument("--out-csv")
    b.add_argument("--out-md")
    b.add_argument("--out-jpeg-curve", help="CSV of mean BER vs JPEG quality")
    b.add_argument("--fig-dir", help="render PNG figures into this directory")
    b.add_argument("--seed", type=int)
    b.add_argument("--workers", type=int)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (OSError, PgmError, ValueError, wm.CalibrationError) as exc:
        _err(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
