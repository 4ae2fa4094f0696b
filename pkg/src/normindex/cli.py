"""Command-line entry point: ``normindex <subcommand> ...``.

Exit codes: 0 success, 2 usage error, 3 data or parse error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness
from .classifier import fit, predict
from .core import build_index, load_index, save_index
from .errors import NormIndexError
from .oracle import oracle_predict
from .search import knn_exact

EXIT_USAGE = 2
EXIT_DATA = 3


class UsageError(Exception):
    pass


def _parse_query(text):
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise UsageError(f"--query must be comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def cmd_build(args, out):
    data = harness.load_csv(args.input, labeled=args.labeled)
    save_index(build_index(data), args.output)
    print(f"wrote {args.output} (n={data.n}, d={data.d})", file=sys.stderr)


def cmd_knn(args, out):
    data = harness.load_csv(args.input, labeled=args.labeled)
    index = load_index(args.index, data)
    for nb in knn_exact(index, data, _parse_query(args.query), args.k):
        out.write(f"{nb.original_index},{nb.distance!r}\n")


def cmd_classify(args, out):
    train = harness.load_csv(args.train, labeled=True)
    test = harness.load_csv(args.test, labeled=True)
    if test.d != train.d:
        raise NormIndexError(f"test has d={test.d}, train has d={train.d}")
    if args.oracle:
        preds = [oracle_predict(train, row, args.k) for row in test.rows]
    else:
        model = fit(train)
        preds = [predict(model, row, args.k) for row in test.rows]
    hits = 0
    for i, (p, t) in enumerate(zip(preds, test.labels)):
        hits += p == t
        out.write(f"{i},{p},{t}\n")
    out.write(f"accuracy={hits / test.n!r}\n")


def cmd_cluster(args, out):
    data = harness.load_csv(args.input, labeled=args.labeled)
    report = harness.cluster_report(data, args.k_min, args.k_max, seed=args.seed)
    out.write(report.to_text())


def cmd_bench(args, out):
    if args.sweep in ("dims", "size"):
        records = harness.bench_build(args.sweep, args.values, reps=args.reps, seed=args.seed,
                                      fixed=args.fixed)
        out.write(harness.bench_csv(records))
        return
    data = harness.load_iris() if args.input is None else harness.load_csv(args.input, labeled=True)
    train, test = harness.train_test_split(data, seed=args.seed)
    ks = args.values or harness.DEFAULT_KS
    result = harness.bench_knn(train, test, ks, reps=args.reps, threads=args.threads)
    out.write(harness.bench_csv(result.records))
    for k in ks:
        a, b = result.accuracy[(k, "nnsa")], result.accuracy[(k, "brute")]
        print(f"k={k} accuracy_nnsa={a!r} accuracy_brute={b!r}", file=sys.stderr)


def build_parser():
    p = argparse.ArgumentParser(prog="normindex", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build", help="build a norm index for a CSV dataset")
    s.add_argument("--input", required=True)
    s.add_argument("--labeled", action="store_true", help="last column is a class label")
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("knn", help="exact k nearest neighbors of a query")
    s.add_argument("--input", required=True)
    s.add_argument("--labeled", action="store_true")
    s.add_argument("--index", required=True)
    s.add_argument("--query", required=True)
    s.add_argument("--k", type=int, required=True)
    s.set_defaults(func=cmd_knn)

    s = sub.add_parser("classify", help="KNN-classify a labelled test CSV")
    s.add_argument("--train", required=True)
    s.add_argument("--test", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--oracle", action="store_true", help="use the exhaustive-scan classifier")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("cluster", help="WCSS per k for band-seeded and random k-means")
    s.add_argument("--input", required=True)
    s.add_argument("--labeled", action="store_true", help="drop the trailing label column")
    s.add_argument("--k-min", type=int, required=True)
    s.add_argument("--k-max", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_cluster)

    s = sub.add_parser("bench", help="timing sweeps")
    s.add_argument("sweep", choices=["dims", "size", "knn"])
    s.add_argument("--reps", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--values", type=_int_list, default=None,
                   help="override the sweep: dims, row counts, or k values")
    s.add_argument("--fixed", type=int, default=None,
                   help="row count for dims, dimension count for size")
    s.add_argument("--input", default=None, help="labelled CSV for knn (default: iris)")
    s.add_argument("--threads", type=int, default=1)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "k", 1) is not None and getattr(args, "k", 1) < 1:
        parser.error("--k must be >= 1")
    if args.command == "bench":
        if args.reps < 1 or args.threads < 1:
            parser.error("--reps and --threads must be >= 1")
        if args.values is not None and not args.values:
            parser.error("--values must be nonempty")
    if args.command == "cluster" and not 1 <= args.k_min <= args.k_max:
        parser.error("need 1 <= --k-min <= --k-max")
    try:
        args.func(args, out)
    except UsageError as exc:
        print(f"normindex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NormIndexError, OSError) as exc:
        print(f"normindex: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
