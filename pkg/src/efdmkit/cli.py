"""Command-line interface.

Subcommands::

    efdmkit image CONTENT --style PATH[:WEIGHT] ... --out OUT.png
    efdmkit tensor X.npy Y.npy --out OUT.npy
    efdmkit stats PATH
    efdmkit bench --n 786432 --methods adain,hm,efdm

Tables go to stdout (fixed width, or CSV with ``--csv``); diagnostics go to
stderr. Exit codes: 0 success, 1 usage error, 2 I/O error, 3 contract
violation.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

import numpy as np
from PIL import UnidentifiedImageError

from . import bench, images, losses, plotting, stats
from .errors import MatchError, NpyFormatError
from .matching import MatchConfig, Method, TieBreak, style_interpolate
from .npyio import read_tensor, write_tensor
from .tensorops import apply_channelwise, resample_sorted

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CONTRACT = 0, 1, 2, 3

SUMMARY_FIELDS = ("mean", "std", "skewness", "kurtosis", "linf")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(v, as_csv: bool) -> str:
    if isinstance(v, float):
        return repr(v) if as_csv else f"{v:.6g}"
    return str(v)


def emit_table(header, rows, as_csv: bool, out=None) -> None:
    out = out or sys.stdout
    if as_csv:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v, True) for v in r])
        return
    cells = [list(header)] + [[_fmt(v, False) for v in r] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    for row in cells:
        out.write("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip() + "\n")


def _summary_cells(s: stats.StatsSummary) -> list:
    return [s.n] + [getattr(s, f) for f in SUMMARY_FIELDS]


def _config(args) -> MatchConfig:
    return MatchConfig(
        method=Method(args.method),
        tie_break=TieBreak(args.tie_break),
        lam=args.lam,
        alpha=args.alpha,
        epsilon=args.epsilon,
        seed=args.seed,
        resample=getattr(args, "resample", False),
    )


def parse_style_spec(spec: str) -> tuple[str, float | None]:
    path, sep, tail = spec.rpartition(":")
    if sep:
        try:
            return path, float(tail)
        except ValueError:
            pass
    return spec, None


# -- image ------------------------------------------------------------------

def cmd_image(args) -> int:
    specs = [parse_style_spec(s) for s in args.style]
    given = [w for _, w in specs if w is not None]
    if given and len(given) != len(specs):
        raise UsageError("give a weight for every style or for none")
    weights = given or [1.0 / len(specs)] * len(specs)
    cfg = _config(args)

    content = images.read_image(args.content)
    styles = [images.read_image(p) for p, _ in specs]
    X = images.to_tensor(content)
    h, w = content.shape[:2]

    if cfg.method is Method.EFDM:
        # one shared input order per channel, then convex combination over styles
        rng = np.random.default_rng(cfg.seed)
        out = np.empty_like(X)
        for c in range(3):
            rows = [resample_sorted(s[:, :, c].ravel().astype(np.float64), h * w)
                    if s.shape[:2] != (h, w) else s[:, :, c].ravel().astype(np.float64)
                    for s in styles]
            out[0, c] = style_interpolate(X[0, c].ravel(), rows, weights, cfg.tie_break,
                                          rng=rng.spawn(1)[0], layout=(h, w)).reshape(h, w)
    else:
        if abs(sum(weights) - 1.0) > 1e-9 or min(weights) < 0:
            raise MatchError(f"style weights must be non-negative and sum to 1, got {weights}")
        cfg = dataclasses.replace(cfg, resample=True)
        out = np.zeros_like(X)
        for wk, s in zip(weights, styles):
            res = apply_channelwise(X, images.to_tensor(s), cfg, rng=np.random.default_rng(cfg.seed))
            out += wk * res.output

    pixels = images.from_tensor(out)
    images.write_png(args.out, pixels)

    rows = []
    for c, name in enumerate("RGB"):
        post = pixels[:, :, c].ravel()
        rows.append([name, stats.ks_distance(post, styles[0][:, :, c].ravel()),
                     stats.summarize(post).mean, stats.summarize(styles[0][:, :, c]).mean])
    emit_table(["channel", "ks_to_style", "output_mean", "style_mean"], rows, args.csv)
    return EXIT_OK


# -- tensor -----------------------------------------------------------------

def cmd_tensor(args) -> int:
    cfg = _config(args)
    X = read_tensor(args.x)
    Y = read_tensor(args.y)
    res = apply_channelwise(X, Y, cfg, workers=args.workers)
    if args.out:
        write_tensor(args.out, res.output)

    B, C = X.shape[:2]
    rows = []
    for b in range(B):
        for c in range(C):
            x, y, o = X[b, c].ravel(), Y[b, c].ravel(), res.output[b, c].ravel()
            for stage, v in (("content", x), ("style", y), ("output", o)):
                rows.append([b, c, stage] + _summary_cells(stats.summarize(v))
                            + [stats.ks_distance(v, y)])
    emit_table(["b", "c", "stage", "n", *SUMMARY_FIELDS, "ks_to_style"], rows, args.csv)

    if args.omega is not None:
        content = losses.content_loss(res.output, X)
        style = losses.style_loss(
            [res.output[b, c] for b in range(B) for c in range(C)],
            [_match_len(Y[b, c], res.output[b, c].size) for b in range(B) for c in range(C)],
            cfg.tie_break, rng=np.random.default_rng(cfg.seed),
        )
        sys.stdout.write("\n")
        emit_table(["content_loss", "style_loss", "omega", "total_loss"],
                   [[content, style, args.omega, losses.combined_loss(content, style, args.omega)]],
                   args.csv)
    if res.lambdas is not None:
        print("lambda per instance: " + ", ".join(f"{v:.6g}" for v in res.lambdas), file=sys.stderr)
    if args.plot:
        plotting.plot_ecdfs([("content", X[0, 0]), ("style", Y[0, 0]), ("output", res.output[0, 0])],
                            args.plot, title=f"{cfg.method.value}, b=0 c=0")
    return EXIT_OK


def _match_len(row, n):
    row = row.ravel()
    return row if row.size == n else resample_sorted(row, n)


# -- stats ------------------------------------------------------------------

def _load_channels(path: str):
    if Path(path).suffix.lower() == ".npy":
        t = read_tensor(path)
        return [(f"b{b}c{c}", t[b, c].ravel()) for b in range(t.shape[0]) for c in range(t.shape[1])]
    px = images.read_image(path)
    return [(name, px[:, :, c].ravel()) for c, name in enumerate("RGB")]


def cmd_stats(args) -> int:
    channels = _load_channels(args.path)
    rows = []
    for name, v in channels:
        s = stats.summarize(v, standardized_linf=args.standardized_linf)
        rows.append([name] + _summary_cells(s) + [stats.equivalent_percent(v)])
    emit_table(["channel", "n", *SUMMARY_FIELDS, "equivalent_percent"], rows, args.csv)

    sys.stdout.write("\n")
    hrows = []
    for name, v in channels:
        counts, edges = stats.histogram(v, args.bins)
        for i, cnt in enumerate(counts):
            hrows.append([name, i, float(edges[i]), float(edges[i + 1]), int(cnt)])
    emit_table(["channel", "bin", "lo", "hi", "count"], hrows, args.csv)
    if args.plot:
        plotting.plot_histograms(channels, args.plot, bins=args.bins)
    return EXIT_OK


# -- bench ------------------------------------------------------------------

def cmd_bench(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.n < bench.MIN_N:
        raise UsageError(f"--n must be >= {bench.MIN_N}")
    if args.runs < bench.MIN_RUNS:
        raise UsageError(f"--runs must be >= {bench.MIN_RUNS}")
    unknown = set(methods) - set(bench.kernels())
    if unknown:
        raise UsageError(f"unknown method(s): {', '.join(sorted(unknown))}")
    dtype = np.float32 if args.dtype == "f32" else np.float64
    reports = bench.run_bench(args.n, methods, args.runs, args.seed, args.bins, dtype)
    emit_table(["method", "n", "seconds", "runs", "throughput"],
               [[r.method, r.n, r.seconds, r.runs, r.throughput] for r in reports], args.csv)
    if args.scaling:
        table = bench.kernels(args.bins)
        srows = []
        for m in methods:
            t1, t8 = bench.scaling_ratio(table[m], args.n, 8, args.runs, args.seed, dtype)
            srows.append([m, args.n, t1, t8, t8 / t1])
        sys.stdout.write("\n")
        emit_table(["method", "n", "seconds_n", "seconds_8n", "ratio"], srows, args.csv)
    if args.plot:
        plotting.plot_bench(reports, args.plot)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _add_match_flags(p, default_method: str) -> None:
    p.add_argument("--method", choices=[m.value for m in Method], default=default_method)
    p.add_argument("--tie-break", choices=[t.value for t in TieBreak], default="quicksort")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="fixed EFDMix weight; sampled from Beta(alpha, alpha) if omitted")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="efdmkit", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("image", help="pixel-space distribution transfer between RGB images")
    p.add_argument("content")
    p.add_argument("--style", action="append", required=True, metavar="PATH[:WEIGHT]")
    _add_match_flags(p, "efdm")
    p.add_argument("--out", required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_image)

    p = sub.add_parser("tensor", help="channel-wise matching of two (B, C, H, W) .npy tensors")
    p.add_argument("x")
    p.add_argument("y")
    _add_match_flags(p, "efdm")
    p.add_argument("--resample", action="store_true",
                   help="resample style rows to the content size for efdm/efdmix")
    p.add_argument("--omega", type=float, default=None, help="also report content/style losses")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--plot", help="write an eCDF figure for row (0, 0)")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("stats", help="per-channel statistics and 64-bin histograms")
    p.add_argument("path", help=".npy tensor or PNG/PPM image")
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--standardized-linf", action="store_true",
                   help="report max |z| of the standardized sample instead of max |v|")
    p.add_argument("--plot", help="write a histogram figure")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="median-of-runs timing of the matching kernels")
    p.add_argument("--n", type=int, default=512 * 512)
    p.add_argument("--methods", default="adain,hm,efdm",
                   help=f"comma list from: {', '.join(bench.kernels())}")
    p.add_argument("--runs", type=int, default=bench.MIN_RUNS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=256, help="bin count for hm-binned")
    p.add_argument("--dtype", choices=["f32", "f64"], default="f32")
    p.add_argument("--scaling", action="store_true",
                   help="also time each method at 8n (interleaved with n) and report the ratio")
    p.add_argument("--plot", help="write a bar chart of the timings")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"efdmkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MatchError, NpyFormatError) as exc:
        print(f"efdmkit: error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        print(f"efdmkit: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
