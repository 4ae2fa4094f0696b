"""K-means with centroid seeding from norm bands.

Seeding sweeps the norm-ordered index outward from its middle position.
Each seed claims every position inside its search band, and the next
seed is the first unclaimed position past that band.  The seeds give a
minimum cluster count which :func:`agglomerative_reduce` merges down to
a target ``k`` before Lloyd refinement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, NormIndex, band_positions, build_index, row_norms
from .errors import InvalidInputError
from .search import SearchBand, nnsa_radius

__all__ = [
    "SeedReport",
    "ClusteringResult",
    "seed_centroids",
    "merge_centroids",
    "agglomerative_reduce",
    "lloyd",
    "wcss",
    "elbow_select",
    "random_centroids",
    "kmeans_nnsa",
    "kmeans_random",
]


@dataclass(frozen=True)
class SeedReport:
    seed_positions: list[int]
    seed_rows: list[int]  # original row index of each seed
    bands: list[SearchBand]
    coverage: bool
    # owner[pos] = seed number (discovery order) that first claimed sorted position pos
    owner: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.seed_positions)

    @property
    def weights(self) -> np.ndarray:
        return np.bincount(self.owner, minlength=self.count)


@dataclass
class ClusteringResult:
    centroids: np.ndarray
    assignments: np.ndarray
    wcss_history: list[float]
    iterations: int
    converged: bool

    @property
    def k(self) -> int:
        return len(self.centroids)

    @property
    def wcss(self) -> float:
        return self.wcss_history[-1]


def seed_centroids(index: NormIndex, data: Dataset) -> SeedReport:
    """Sweep the index from position ``n // 2`` upward, then downward."""
    index.check_binding(data)
    n = index.n
    owner = np.full(n, -1, dtype=np.int64)
    seeds: list[int] = []
    bands: list[SearchBand] = []

    def claim(pos):
        band = nnsa_radius(index, data, pos)
        span = band_positions(index, band.lo, band.hi)
        block = owner[span.start:span.stop]
        block[block < 0] = len(seeds)
        seeds.append(pos)
        bands.append(band)
        return span

    mid = claim(n // 2)
    nxt = mid.stop
    while nxt < n:
        if owner[nxt] >= 0:
            nxt += 1
        else:
            nxt = max(claim(nxt).stop, nxt + 1)
    # bands claimed above may reach below the middle band
    nxt = mid.start - 1
    while nxt >= 0:
        if owner[nxt] >= 0:
            nxt -= 1
        else:
            nxt = min(claim(nxt).start, nxt) - 1

    rows = [int(index.order[p]) for p in seeds]
    return SeedReport(seeds, rows, bands, bool((owner >= 0).all()), owner)


def merge_centroids(centroids, weights, target_k):
    """Merge the closest pair of centroids until ``target_k`` remain.

    A merged centroid is the weight-averaged mean of its two parts.
    Returns ``(centroids, weights)``.
    """
    cents = [np.asarray(c, dtype=np.float64) for c in centroids]
    w = [float(x) for x in weights]
    if len(cents) != len(w):
        raise InvalidInputError("need one weight per centroid")
    if not 1 <= target_k <= len(cents):
        raise InvalidInputError(f"target_k must be in [1, {len(cents)}], got {target_k}")
    while len(cents) > target_k:
        c = np.array(cents)
        diff = c[:, None, :] - c[None, :, :]
        dist = np.sqrt((diff * diff).sum(-1))
        dist[np.tril_indices(len(cents))] = np.inf
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        wi, wj = w[i], w[j]
        cents[i] = (wi * cents[i] + wj * cents[j]) / (wi + wj)
        w[i] = wi + wj
        del cents[j], w[j]
    return np.array(cents), np.array(w)


def agglomerative_reduce(data: Dataset, seeds: SeedReport, target_k: int) -> np.ndarray:
    """Seed rows merged down to ``target_k`` centroids, weighted by band membership.

    ``seeds`` must come from :func:`seed_centroids` over ``data``.
    """
    if not 1 <= target_k <= seeds.count:
        raise InvalidInputError(f"target_k must be in [1, {seeds.count}], got {target_k}")
    centroids, _ = merge_centroids(data.rows[seeds.seed_rows], seeds.weights, target_k)
    return centroids


def wcss(data, assignments, centroids, norms=None) -> float:
    """Within-cluster sum of squared distances.

    With ``norms`` (the cached row norms, in original row order) the
    squared distances use ``||x||^2 + ||c||^2 - 2 <x, c>``; otherwise
    they come from coordinate differences.
    """
    rows = data.rows if isinstance(data, Dataset) else np.asarray(data, dtype=np.float64)
    centroids = np.asarray(centroids, dtype=np.float64)
    assignments = np.asarray(assignments)
    if assignments.shape != (rows.shape[0],):
        raise InvalidInputError("need one assignment per row")
    if assignments.size and not (0 <= assignments.min() and assignments.max() < len(centroids)):
        raise InvalidInputError("assignment refers to a missing centroid")
    c = centroids[assignments]
    if norms is None:
        diff = rows - c
        return float((diff * diff).sum())
    cn2 = (centroids * centroids).sum(1)[assignments]
    d2 = np.asarray(norms) ** 2 + cn2 - 2.0 * np.einsum("ij,ij->i", rows, c)
    return float(np.maximum(d2, 0.0).sum())


def _assign(rows, norms2, centroids):
    cn2 = row_norms(centroids) ** 2
    d2 = norms2[:, None] + cn2[None, :] - 2.0 * rows @ centroids.T
    np.maximum(d2, 0.0, out=d2)
    a = np.argmin(d2, axis=1)
    return a, float(d2[np.arange(len(rows)), a].sum())


def lloyd(data: Dataset, initial_centroids, max_iter=100, tol=1e-6, index=None) -> ClusteringResult:
    """Lloyd iterations from the given centroids.

    Row norms are taken from ``index`` when given and centroid norms are
    recomputed once per iteration.  A cluster left empty is re-seeded
    with the row farthest from its own centroid.
    """
    rows = data.rows
    cents = np.array(initial_centroids, dtype=np.float64, ndmin=2)
    k = len(cents)
    if k == 0 or cents.size == 0:
        raise InvalidInputError("need at least one initial centroid")
    if k > data.n:
        raise InvalidInputError(f"{k} centroids for {data.n} rows")
    if cents.shape[1] != data.d:
        raise InvalidInputError(f"centroids have d={cents.shape[1]}, data has d={data.d}")
    if max_iter < 1 or not tol > 0:
        raise InvalidInputError("max_iter must be >= 1 and tol > 0")

    if index is not None:
        index.check_binding(data)
        norms = np.empty(data.n)
        norms[index.order] = index.norms
    else:
        norms = row_norms(rows)
    norms2 = norms * norms

    a, j = _assign(rows, norms2, cents)
    history = [j]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        sums = np.zeros_like(cents)
        np.add.at(sums, a, rows)
        counts = np.bincount(a, minlength=k)
        new = cents.copy()
        nonempty = counts > 0
        new[nonempty] = sums[nonempty] / counts[nonempty, None]
        empty = np.flatnonzero(~nonempty)
        if empty.size:
            diff = rows - new[a]
            far = (diff * diff).sum(1)
            for c in empty:
                r = int(np.argmax(far))
                new[c] = rows[r]
                far[r] = -1.0
        shift = float(np.sqrt(((new - cents) ** 2).sum(1)).max())
        cents = new
        a, j = _assign(rows, norms2, cents)
        history.append(j)
        if shift < tol:
            converged = True
            break
    return ClusteringResult(cents, a, history, it, converged)


def elbow_select(wcss_by_k) -> int:
    """Interior ``k`` with the largest second difference of the WCSS curve.

    ``wcss_by_k`` is a sequence of ``(k, wcss)`` pairs with ascending ``k``.
    Near-equal second differences count as ties and go to the smaller ``k``.
    """
    pts = list(wcss_by_k)
    if len(pts) < 3:
        raise InvalidInputError("elbow selection needs at least 3 points")
    ks = [k for k, _ in pts]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise InvalidInputError("k values must be strictly ascending")
    w = np.array([v for _, v in pts], dtype=np.float64)
    if (w < 0).any():
        raise InvalidInputError("WCSS values must be nonnegative")
    second = w[:-2] - 2.0 * w[1:-1] + w[2:]
    tie_tol = 1e-12 * max(float(np.abs(w).max()), 1e-300)
    best = second.max()
    i = int(np.flatnonzero(second >= best - tie_tol)[0])
    return ks[i + 1]


def random_centroids(data: Dataset, k: int, rng) -> np.ndarray:
    """``k`` distinct rows chosen uniformly at random."""
    rng = np.random.default_rng(rng)
    if not 1 <= k <= data.n:
        raise InvalidInputError(f"k must be in [1, {data.n}], got {k}")
    return data.rows[rng.choice(data.n, size=k, replace=False)].copy()


def kmeans_nnsa(data: Dataset, k: int, index=None, seeds=None, max_iter=100, tol=1e-6):
    """Band seeding, agglomerative merge to ``k``, then Lloyd."""
    index = build_index(data) if index is None else index
    seeds = seed_centroids(index, data) if seeds is None else seeds
    init = agglomerative_reduce(data, seeds, k)
    return lloyd(data, init, max_iter=max_iter, tol=tol, index=index)


def kmeans_random(data: Dataset, k: int, seed=0, n_init=10, max_iter=100, tol=1e-6, index=None):
    """Best of ``n_init`` Lloyd runs from uniformly random rows."""
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_init):
        res = lloyd(data, random_centroids(data, k, rng), max_iter=max_iter, tol=tol, index=index)
        if best is None or res.wcss < best.wcss:
            best = res
    return best
