"""Command-line entry point.

Subcommands: trop-eval, trop-normalize, featurize, dist, ph,
mnist-features, mnist-classify.  Exit codes: 0 success, 1 usage error,
2 input-format error, 3 computation error.  Results go to stdout,
diagnostics to stderr; nothing is written to stdout on failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from . import barcode as bc
from . import coords, metrics, mnist, persistence, tropical


class UsageError(Exception):
    pass


def _fmt(v: float) -> str:
    return format(float(v), ".12g")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="tropcoords", description=__doc__)
    parser.add_argument("--version", action="version", version=f"tropcoords {__version__}")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--threads", type=int, default=1, help="worker cap for parallel stages")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("trop-eval", help="evaluate a tropical expression at a point")
    p.add_argument("--expr", required=True)
    p.add_argument("--at", default="", help="assignments var=value,var=value,...")

    p = sub.add_parser("trop-normalize", help="rewrite an expression as p - q of max-plus forms")
    p.add_argument("--expr", required=True)

    p = sub.add_parser("featurize", help="evaluate coordinate specs on a barcode file")
    p.add_argument("--barcode", required=True)
    p.add_argument("--specs", required=True)

    p = sub.add_parser("dist", help="distance between two barcode files")
    p.add_argument("--metric", required=True, choices=["bottleneck", "w1", "w2", "wp"])
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = sub.add_parser("ph", help="persistence barcode of a sweep filtration on a PGM image")
    p.add_argument("--image", required=True)
    p.add_argument("--dir", required=True, choices=["top", "bottom", "left", "right"])
    p.add_argument("--dim", required=True, type=int, choices=[0, 1])
    p.add_argument("--threshold", type=int, default=100)

    p = sub.add_parser("mnist-features", help="featurize an IDX digit dataset")
    p.add_argument("--images", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--meta", required=True)
    p.add_argument("--m", type=int, default=28)
    p.add_argument("--threshold", type=int, default=100)

    p = sub.add_parser("mnist-classify", help="k-fold cross-validated k-NN on saved features")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=42)

    return parser


def _parse_point(text: str) -> dict[str, float]:
    point: dict[str, float] = {}
    text = text.strip()
    if not text:
        return point
    for piece in text.split(","):
        name, eq, value = piece.partition("=")
        name = name.strip()
        if not eq or not name:
            raise UsageError(f"bad assignment {piece!r}, expected var=value")
        try:
            point[name] = float(value)
        except ValueError:
            raise UsageError(f"bad value in assignment {piece!r}") from None
    return point


def _term_json(t: tropical.AffineTerm) -> dict:
    return {"constant": t.constant, "exponents": {v: e for v, e in t.exponents}}


def cmd_trop_eval(args) -> int:
    expr = tropical.parse_tropical(args.expr)
    point = _parse_point(args.at)
    missing = sorted(tropical.variables(expr) - set(point))
    if missing:
        raise UsageError(f"--at is missing values for: {', '.join(missing)}")
    value = tropical.trop_eval(expr, point)
    if args.json:
        print(json.dumps({"value": value}))
    else:
        print(_fmt(value))
    return 0


def cmd_trop_normalize(args) -> int:
    expr = tropical.parse_tropical(args.expr)
    rnf = tropical.to_rational_normal_form(expr)
    if args.json:
        print(
            json.dumps(
                {
                    "p": [_term_json(t) for t in rnf.numerator.terms],
                    "q": [_term_json(t) for t in rnf.denominator.terms],
                }
            )
        )
    else:
        print(f"p: {tropical.to_text(rnf.numerator.to_expr())}")
        print(f"q: {tropical.to_text(rnf.denominator.to_expr())}")
    return 0


def cmd_featurize(args) -> int:
    b = bc.read_file(args.barcode)
    specs = coords.parse_specs_file(args.specs)
    values = coords.featurize(b, specs)
    if args.json:
        print(json.dumps({"values": values}))
    else:
        print(",".join(_fmt(v) for v in values))
    return 0


def cmd_dist(args) -> int:
    a = bc.read_file(args.a)
    b = bc.read_file(args.b)
    if args.metric == "bottleneck":
        value = metrics.bottleneck(a, b)
    else:
        if args.metric == "wp":
            if args.p is None:
                raise UsageError("--metric wp requires --p")
            p = args.p
        else:
            p = {"w1": 1.0, "w2": 2.0}[args.metric]
        if not p >= 1.0:
            raise UsageError(f"--p {p} must be >= 1")
        value = metrics.wasserstein(p, a, b)
    if args.json:
        print(json.dumps({"metric": args.metric, "value": value}))
    else:
        print(_fmt(value))
    return 0


def cmd_ph(args) -> int:
    img = persistence.read_pgm(args.image)
    binary = persistence.threshold(img, args.threshold)
    direction = persistence.SweepDirection(args.dir)
    h0, h1 = persistence.sweep_barcodes(binary, direction)
    chosen = h0 if args.dim == 0 else h1
    if args.json:
        print(
            json.dumps(
                {
                    "barcode": [[iv.x, iv.d] for iv in chosen],
                    "dim": args.dim,
                    "direction": direction.name,
                    "essential_death": persistence.sweep_extent(
                        direction, binary.rows, binary.cols
                    ),
                    "indexing": "0-based",
                }
            )
        )
    else:
        sys.stdout.write(bc.dumps(chosen))
    return 0


def cmd_mnist_features(args) -> int:
    if args.m < 1:
        raise UsageError(f"--m {args.m} must be >= 1")
    ds = mnist.load_dataset(args.images, args.labels, args.count)
    matrix = mnist.featurize_dataset(
        ds, m=args.m, t=args.threshold, workers=max(1, args.threads)
    )
    mnist.save_features(args.out, matrix)
    meta = mnist.feature_metadata(matrix, args.m, args.threshold)
    with open(args.meta, "w", encoding="ascii") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    if args.json:
        print(json.dumps({"rows": matrix.rows, "out": args.out, "meta": args.meta}))
    else:
        print(f"wrote {matrix.rows} x {len(matrix.columns)} features to {args.out}")
    return 0


def cmd_mnist_classify(args) -> int:
    if args.folds < 2:
        raise UsageError(f"--folds {args.folds} must be >= 2")
    if args.k < 1:
        raise UsageError(f"--k {args.k} must be >= 1")
    x = mnist.load_features(args.features)
    y = mnist.read_idx_labels(args.labels)
    if len(y) < x.shape[0]:
        raise mnist.DatasetError(f"{x.shape[0]} feature rows but {len(y)} labels")
    y = y[: x.shape[0]]
    scores = mnist.cross_validate_scores(x, y, args.folds, args.k, args.seed)
    mean = sum(scores) / len(scores)
    if args.json:
        print(json.dumps({"folds": scores, "mean": mean}))
    else:
        for i, s in enumerate(scores, start=1):
            print(f"fold {i}: {_fmt(s)}")
        print(f"mean: {_fmt(mean)}")
    return 0


_COMMANDS = {
    "trop-eval": cmd_trop_eval,
    "trop-normalize": cmd_trop_normalize,
    "featurize": cmd_featurize,
    "dist": cmd_dist,
    "ph": cmd_ph,
    "mnist-features": cmd_mnist_features,
    "mnist-classify": cmd_mnist_classify,
}

_INPUT_ERRORS = (
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
    bc.BarcodeError,
    bc.BarcodeFormatError,
    coords.SpecsFormatError,
    tropical.TropicalSyntaxError,
    persistence.PgmFormatError,
    persistence.ImageError,
    mnist.IdxFormatError,
    mnist.DatasetError,
)

_COMPUTE_ERRORS = (
    metrics.MetricError,
    coords.CoordinateError,
    persistence.ComplexError,
    tropical.TropicalError,
    ValueError,
    ArithmeticError,
)


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"tropcoords: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return 0 if exc.code in (0, None) else int(exc.code)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"tropcoords: error: {exc}", file=sys.stderr)
        return 1
    except _INPUT_ERRORS as exc:
        print(f"tropcoords: input error: {exc}", file=sys.stderr)
        return 2
    except _COMPUTE_ERRORS as exc:
        print(f"tropcoords: computation error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
