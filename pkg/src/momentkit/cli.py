"""Command-line frontend.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
instability detected in strict mode.  Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .engine import (Image, decompose, default_scheme, reconstruct,
                     strict_mode_enabled)
from .errors import DataError, DomainError, MomentKitError, SchemeError
from .geometry import Scheme
from .harness import EXPERIMENTS, ExperimentConfig
from .invariants import magnitude_features, nn_classify
from .methods import ALL_FAMILIES, MethodSpec, order_set
from .momentfile import read_moments, write_moments
from .pgm import read_image_file, write_image_file

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_UNSTABLE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_method(args) -> MethodSpec:
    return MethodSpec(args.method, p=args.p, q=args.q, alpha=args.alpha,
                      bessel_order=args.bessel_v)


def build_scheme(args, method: MethodSpec) -> Scheme:
    base = default_scheme(method)
    return Scheme(
        mapping=args.mapping or base.mapping,
        rule=args.rule or base.rule,
        strategy=args.strategy or base.strategy,
        boundary=args.boundary or base.boundary,
        fft_size=args.M,
    )


def _add_method_args(p):
    p.add_argument("--method", required=True,
                   help="kernel family: " + ", ".join(f.lower() for f in ALL_FAMILIES))
    p.add_argument("--p", type=float, default=None, help="Jacobi parameter p (jfm/fjfm)")
    p.add_argument("--q", type=float, default=None, help="Jacobi parameter q (jfm/fjfm)")
    p.add_argument("--alpha", type=float, default=None, help="fractional parameter")
    p.add_argument("--bessel-v", type=float, default=1.0, help="BFM Bessel order v")
    p.add_argument("--K", type=int, required=True, help="maximum order K")


def _add_scheme_args(p):
    p.add_argument("--mapping", choices=("incircle", "circumcircle", "polar"))
    p.add_argument("--rule", help="zoa | up:<s> | gauss:<g>")
    p.add_argument("--strategy", choices=("naive", "symmetric", "recursive", "fft"))
    p.add_argument("--boundary", choices=("asis", "strict", "clip"))
    p.add_argument("--M", type=int, default=None, help="FFT sampling size")
    p.add_argument("--threads", type=int, default=1,
                   help="worker count (results are identical for any value)")
    p.add_argument("--png", action="store_true", help="allow PNG image I/O")


def make_parser() -> _Parser:
    ap = _Parser(prog="momentkit",
                 description="Unit-disk orthogonal image moments toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="image -> moment file")
    _add_method_args(p)
    _add_scheme_args(p)
    p.add_argument("-i", "--input", required=True, help="input image (PGM P5)")
    p.add_argument("-o", "--output", required=True, help="output moments JSON")

    p = sub.add_parser("reconstruct", help="moment file -> image")
    p.add_argument("-i", "--input", required=True, help="input moments JSON")
    p.add_argument("--size", type=int, required=True, help="output raster size N")
    p.add_argument("-o", "--output", required=True, help="output image (PGM P5)")
    p.add_argument("--png", action="store_true", help="allow PNG image I/O")

    p = sub.add_parser("features", help="moment file -> |M_nm| feature CSV")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("classify", help="nearest-gallery classification")
    _add_method_args(p)
    _add_scheme_args(p)
    p.add_argument("--gallery", required=True, help="directory of gallery images")
    p.add_argument("--query", required=True, help="query image")

    p = sub.add_parser("bench", help="run an experiment from a config")
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--config", default=None, help="JSON config (defaults apply)")
    p.add_argument("-o", "--output", required=True, help="report CSV path")
    p.add_argument("--json", dest="json_out", default=None, help="also write JSON")
    p.add_argument("--plot", nargs="?", const="", default=None, metavar="DIR",
                   help="render figures next to the CSV (needs matplotlib); "
                        "optional DIR overrides the output directory")
    p.add_argument("--no-plot", action="store_true", help="suppress figures")
    return ap


def cmd_decompose(args) -> int:
    method = build_method(args)
    scheme = build_scheme(args, method)
    img = read_image_file(args.input, allow_png=args.png)
    ms = decompose(img, method, args.K, scheme, threads=args.threads)
    write_moments(ms, args.output)
    if ms.unstable:
        print("warning: non-finite moments (numerical instability)",
              file=sys.stderr)
        if strict_mode_enabled():
            return EXIT_UNSTABLE
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    ms = read_moments(args.input)
    raw = reconstruct(ms, args.size)
    write_image_file(Image.from_raw(raw), args.output, allow_png=args.png)
    return EXIT_OK


def cmd_features(args) -> int:
    ms = read_moments(args.input)
    fv = magnitude_features(ms)
    idx = order_set(ms.method, ms.K).indices
    lines = ["n,m,magnitude"]
    for (n, m), v in zip(idx, fv.values):
        lines.append(f"{n},{m},{v!r}")
    Path(args.output).write_text("\n".join(lines) + "\n", encoding="ascii")
    return EXIT_OK


def cmd_classify(args) -> int:
    method = build_method(args)
    scheme = build_scheme(args, method)
    gallery_dir = Path(args.gallery)
    paths = sorted(p for p in gallery_dir.iterdir()
                   if p.suffix.lower() in (".pgm", ".png"))
    if not paths:
        raise DataError(f"no gallery images in {gallery_dir}")
    gallery = []
    for p in paths:
        img = read_image_file(p, allow_png=args.png)
        ms = decompose(img, method, args.K, scheme, threads=args.threads)
        gallery.append((p.stem, magnitude_features(ms)))
    qimg = read_image_file(args.query, allow_png=args.png)
    qms = decompose(qimg, method, args.K, scheme, threads=args.threads)
    label = nn_classify(magnitude_features(qms), gallery)
    print(label)
    return EXIT_OK


def cmd_bench(args) -> int:
    config = (ExperimentConfig.from_json(args.config) if args.config
              else ExperimentConfig())
    report = EXPERIMENTS[args.experiment](config)
    out_csv = Path(args.output)
    report.write(out_csv, args.json_out)
    if not args.no_plot:
        from .plots import matplotlib_available, render_report
        if args.plot is not None or matplotlib_available():
            if not matplotlib_available():
                print("note: matplotlib unavailable; skipping figures",
                      file=sys.stderr)
            else:
                plot_dir = args.plot if args.plot else str(out_csv.parent)
                written = render_report(report, plot_dir, stem=out_csv.stem)
                for w in written:
                    print(f"figure: {w}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "decompose": cmd_decompose,
    "reconstruct": cmd_reconstruct,
    "features": cmd_features,
    "classify": cmd_classify,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, SchemeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except MomentKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
