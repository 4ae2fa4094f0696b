"""Data loading, synthetic data, and timing/accuracy sweeps."""

from __future__ import annotations

import csv
import io
import math
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .classifier import fit, majority_vote, predict
from .core import Dataset, build_index
from .errors import InvalidInputError, ParseError
from .kmeans import elbow_select, kmeans_nnsa, kmeans_random, seed_centroids
from .oracle import oracle_knn

IRIS_SPLIT_SEED = 20200101
DEFAULT_DIMS = (10, 50, 100, 200)
DEFAULT_SIZES = (10_000, 100_000)
DEFAULT_KS = (1, 3, 5, 7)


# -- ingestion ---------------------------------------------------------------


def _parse_float(tok, lineno):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", lineno) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value: {tok!r}", lineno)
    return v


def _is_header(fields):
    for tok in fields:
        try:
            float(tok)
        except ValueError:
            return True
    return False


def parse_csv(text: str, labeled: bool = False) -> Dataset:
    """Parse CSV text into a Dataset.

    A first row containing any non-numeric field is a header and is
    skipped.  With ``labeled`` the last column holds class labels.
    """
    rows, labels = [], []
    width = None
    first = True
    for lineno, fields in enumerate(csv.reader(io.StringIO(text)), start=1):
        fields = [f.strip() for f in fields]
        if not fields or fields == [""]:
            continue
        if first:
            first = False
            values = fields[:-1] if labeled else fields
            if _is_header(values):
                continue
        if width is None:
            width = len(fields)
            if labeled and width < 2:
                raise ParseError("labelled rows need at least one value and a label", lineno)
        elif len(fields) != width:
            raise ParseError(f"expected {width} fields, got {len(fields)}", lineno)
        if labeled:
            labels.append(fields[-1])
            fields = fields[:-1]
        rows.append([_parse_float(f, lineno) for f in fields])
    if not rows:
        raise ParseError("no data rows")
    return Dataset(np.array(rows), labels if labeled else None)


def load_csv(path: str | os.PathLike, labeled: bool = False) -> Dataset:
    with open(path, newline="") as f:
        return parse_csv(f.read(), labeled=labeled)


def format_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """CSV text with floats printed in their shortest round-tripping form."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def iris_csv_path():
    return resources.files("normindex") / "data" / "iris.csv"


def load_iris() -> Dataset:
    """Fisher's iris measurements (150 rows, 4 features, 3 species)."""
    return parse_csv(iris_csv_path().read_text(), labeled=True)


def train_test_split(data: Dataset, test_fraction=0.2, seed=IRIS_SPLIT_SEED):
    """Shuffle rows with ``seed`` and split off the last ``test_fraction``."""
    if not 0 < test_fraction < 1:
        raise InvalidInputError("test_fraction must be in (0, 1)")
    perm = np.random.default_rng(seed).permutation(data.n)
    n_test = int(round(data.n * test_fraction))
    if not 0 < n_test < data.n:
        raise InvalidInputError(f"cannot split {data.n} rows with fraction {test_fraction}")
    tr, te = perm[:-n_test], perm[-n_test:]
    labels = data.labels

    def take(ix):
        return Dataset(data.rows[ix], None if labels is None else labels[ix])

    return take(tr), take(te)


# -- synthetic data ----------------------------------------------------------


def generate(n, d, seed=0, kind="uniform", centers=None, spread=1.0) -> Dataset:
    """Reproducible random data.

    ``uniform`` draws coordinates from [-1, 1).  ``blobs`` draws Gaussian
    clusters with standard deviation ``spread`` around ``centers`` (rows
    are dealt round-robin) and labels each row with its center id.
    """
    if n < 1 or d < 1:
        raise InvalidInputError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    if kind == "uniform":
        return Dataset(rng.uniform(-1.0, 1.0, size=(n, d)))
    if kind == "blobs":
        if centers is None:
            raise InvalidInputError("blobs need centers")
        centers = np.asarray(centers, dtype=np.float64)
        if centers.ndim != 2 or centers.shape[1] != d:
            raise InvalidInputError(f"centers must have shape (m, {d})")
        if not spread >= 0:
            raise InvalidInputError("spread must be >= 0")
        ids = np.arange(n) % len(centers)
        rows = centers[ids] + rng.normal(0.0, spread, size=(n, d))
        return Dataset(rows, ids.tolist())
    raise InvalidInputError(f"unknown kind {kind!r}")


# -- benchmarks --------------------------------------------------------------


@dataclass(frozen=True)
class BenchRecord:
    param: int
    variant: str
    seconds: float
    repetitions: int


def _median_time(fn, reps):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def bench_build(sweep: str, values: Sequence[int] | None = None, reps=5, seed=0,
                fixed: int | None = None) -> list[BenchRecord]:
    """Median ``build_index`` time across a dimension or row-count sweep.

    ``sweep="dims"`` varies d at ``fixed`` rows (default 100000);
    ``sweep="size"`` varies n at ``fixed`` dimensions (default 200).
    """
    if sweep == "dims":
        values = DEFAULT_DIMS if values is None else values
        fixed = 100_000 if fixed is None else fixed
        shape = lambda v: (fixed, v)  # noqa: E731
    elif sweep == "size":
        values = DEFAULT_SIZES if values is None else values
        fixed = 200 if fixed is None else fixed
        shape = lambda v: (v, fixed)  # noqa: E731
    else:
        raise InvalidInputError(f"unknown sweep {sweep!r}")
    if not values:
        raise InvalidInputError("sweep values must be nonempty")
    if reps < 1:
        raise InvalidInputError("reps must be >= 1")
    out = []
    for v in values:
        data = generate(*shape(v), seed=seed)
        out.append(BenchRecord(v, "nnsa", _median_time(lambda: build_index(data), reps), reps))
    return out


@dataclass
class KnnBench:
    records: list[BenchRecord]
    accuracy: dict[tuple[int, str], float]  # (k, variant) -> accuracy


def _brute_predict(train, row, k):
    return majority_vote(train.labels, oracle_knn(train, row, k))


def bench_knn(train: Dataset, test: Dataset, ks=DEFAULT_KS, reps=3, threads=1) -> KnnBench:
    """Time and score indexed vs exhaustive-scan KNN prediction for each k."""
    if reps < 1:
        raise InvalidInputError("reps must be >= 1")
    model = fit(train)
    arms = {
        "nnsa": lambda row, k: predict(model, row, k),
        "brute": lambda row, k: _brute_predict(train, row, k),
    }
    records, accuracy = [], {}
    for k in ks:
        for name, fn in arms.items():
            preds = []

            def run():
                if threads > 1:
                    with ThreadPoolExecutor(threads) as ex:
                        preds[:] = list(ex.map(lambda r: fn(r, k), test.rows))
                else:
                    preds[:] = [fn(r, k) for r in test.rows]

            records.append(BenchRecord(k, name, _median_time(run, reps), reps))
            accuracy[(k, name)] = float(np.mean([p == t for p, t in zip(preds, test.labels)]))
    return KnnBench(records, accuracy)


def bench_csv(records: Sequence[BenchRecord]) -> str:
    return format_csv(["param", "variant", "seconds"],
                      [(r.param, r.variant, r.seconds) for r in records])


# -- clustering report -------------------------------------------------------


@dataclass
class ClusterReport:
    rows: list[tuple[int, str, float]]  # (k, arm, wcss)
    seed_count: int
    k_opt_nnsa: int | None
    k_opt_random: int | None

    def curve(self, arm):
        return [(k, w) for k, a, w in self.rows if a == arm]

    def to_text(self) -> str:
        text = format_csv(["k", "arm", "wcss"], self.rows)
        text += f"seed_count={self.seed_count}\n"
        text += f"k_opt_nnsa={self.k_opt_nnsa}\n"
        text += f"k_opt_random={self.k_opt_random}\n"
        return text


def cluster_report(data: Dataset, k_min=1, k_max=10, seed=0, n_init=10) -> ClusterReport:
    """WCSS per k for band-seeded and randomly seeded k-means.

    The band-seeded arm can only reach k up to its seed count; larger k
    are reported for the random arm alone.
    """
    if not 1 <= k_min <= k_max <= data.n:
        raise InvalidInputError(f"need 1 <= k_min <= k_max <= {data.n}")
    index = build_index(data)
    seeds = seed_centroids(index, data)
    rows = []
    for k in range(k_min, k_max + 1):
        if k <= seeds.count:
            res = kmeans_nnsa(data, k, index=index, seeds=seeds)
            rows.append((k, "nnsa", res.wcss))
        res = kmeans_random(data, k, seed=seed + k, n_init=n_init, index=index)
        rows.append((k, "random", res.wcss))

    def pick(arm):
        curve = [(k, w) for k, a, w in rows if a == arm]
        return elbow_select(curve) if len(curve) >= 3 else None

    return ClusterReport(rows, seeds.count, pick("nnsa"), pick("random"))
