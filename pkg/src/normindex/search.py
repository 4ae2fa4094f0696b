"""Exact neighbor queries over a :class:`~normindex.core.NormIndex`.

Distances reuse the cached row norms:

    ||x - y||^2 = ||x||^2 + ||y||^2 - 2 <x, y>

so only the dot product is computed per candidate.  Candidates are
restricted to a norm band ``[||q|| - r, ||q|| + r]``; by the triangle
inequality every row within distance ``r`` of ``q`` has its norm inside
that band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import Dataset, NormIndex, _sq_norm, band_positions, euclidean_norm, ordered_pos_of
from .errors import InvalidInputError, UndefinedSimilarityError

__all__ = [
    "Neighbor",
    "SearchBand",
    "SearchStats",
    "distance_from_norms",
    "cosine_similarity",
    "nnsa_radius",
    "knn_exact",
    "knn_of_row",
    "range_search",
]

# Below this ratio of d^2 to ||x||^2 + ||y||^2 the decomposed form loses
# more than ~1e-10 relative accuracy to cancellation; such pairs are
# recomputed from the coordinate differences.
_CANCELLATION_RATIO = 1e-4
_EPS = np.finfo(np.float64).eps


class Neighbor(NamedTuple):
    original_index: int
    distance: float


@dataclass(frozen=True)
class SearchBand:
    """Norm interval ``[center_norm - radius, center_norm + radius]``."""

    center_norm: float
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise InvalidInputError(f"radius must be >= 0, got {self.radius}")

    @property
    def lo(self) -> float:
        return self.center_norm - self.radius

    @property
    def hi(self) -> float:
        return self.center_norm + self.radius


@dataclass
class SearchStats:
    """Work counters for a single :func:`knn_exact` call."""

    evaluations: int = 0  # distance computations performed
    unique_positions: int = 0  # distinct sorted positions evaluated
    rounds: int = 0  # number of bands scanned
    initial_radius: float = 0.0
    final_radius: float = 0.0


def distance_from_norms(norm_x, norm_y, dot_xy):
    """Euclidean distance from two norms and a dot product.

    Works elementwise on arrays.  Negative round-off under the square
    root is clamped to zero.
    """
    return _distance_from_sq_norms(np.asarray(norm_x) ** 2, np.asarray(norm_y) ** 2, dot_xy)


def _distance_from_sq_norms(sq_x, sq_y, dot_xy):
    d2 = np.asarray(sq_x) + np.asarray(sq_y) - 2.0 * np.asarray(dot_xy)
    out = np.sqrt(np.maximum(d2, 0.0))
    return float(out) if out.ndim == 0 else out


def cosine_similarity(x, y, norm_x=None, norm_y=None) -> float:
    """``<x, y> / (||x|| ||y||)`` clamped to ``[-1, 1]``.

    Pass cached norms to skip recomputing them.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if norm_x is None:
        norm_x = euclidean_norm(x)
    if norm_y is None:
        norm_y = euclidean_norm(y)
    if norm_x == 0 or norm_y == 0:
        raise UndefinedSimilarityError("cosine similarity is undefined for a zero vector")
    c = float(np.dot(x, y)) / (norm_x * norm_y)
    return min(1.0, max(-1.0, c))


def _distances(data, index, positions, query, q_sq):
    """Distances from ``query`` to the rows at sorted ``positions``."""
    orig = index.order[positions]
    rows = data.rows[orig]
    cand_sq = index.sq_norms[positions]
    dist = np.atleast_1d(_distance_from_sq_norms(q_sq, cand_sq, rows @ query))
    small = dist**2 < _CANCELLATION_RATIO * (q_sq + cand_sq)
    if small.any():
        diff = rows[small] - query
        dist[small] = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return dist


def nnsa_radius(index: NormIndex, data: Dataset, pos: int) -> SearchBand:
    """Search band for the row at sorted position ``pos``.

    The radius is the smaller of the distances from that row to its
    immediate neighbors in norm order (positions ``pos - 1`` and
    ``pos + 1``, whichever exist).  A single-row index gets radius 0.
    """
    index.check_binding(data)
    if not 0 <= pos < index.n:
        raise IndexError(f"ordered position {pos} out of range for n={index.n}")
    q = data.rows[index.order[pos]]
    q_norm = float(index.norms[pos])
    adj = [p for p in (pos - 1, pos + 1) if 0 <= p < index.n]
    if not adj:
        return SearchBand(q_norm, 0.0)
    radius = float(_distances(data, index, np.array(adj), q, index.sq_norms[pos]).min())
    return SearchBand(q_norm, radius)


def _validate_query(query, d):
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (d,):
        raise InvalidInputError(f"query must have {d} coordinates, got shape {q.shape}")
    if not np.isfinite(q).all():
        raise InvalidInputError("query has a non-finite coordinate")
    return q


def _slack(*values):
    # absorbs rounding in stored norms so closed bands stay sound
    return 8.0 * _EPS * sum(abs(v) for v in values)


def knn_exact(index, data, query, k, return_stats=False):
    """The ``k`` nearest rows to ``query``, ordered by (distance, original index).

    The result is identical to an exhaustive scan.  The search starts
    from a band whose radius is the distance between the query and its
    norm-order neighbors, then widens the band by that same amount until
    the k-th best distance found lies inside it.

    Parameters
    ----------
    index : NormIndex
        Index built over ``data``.
    data : Dataset
    query : array_like, shape (d,)
    k : int
        Number of neighbors, ``1 <= k <= n``.
    return_stats : bool, optional
        Also return a :class:`SearchStats` with work counters.

    Returns
    -------
    list of Neighbor
        Or ``(neighbors, stats)`` when ``return_stats`` is true.
    """
    index.check_binding(data)
    n = index.n
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise InvalidInputError(f"k must be an integer in [1, {n}], got {k!r}")
    q = _validate_query(query, index.d)
    q_sq = _sq_norm(q)
    q_norm = math.sqrt(q_sq)
    norms = index.norms
    stats = SearchStats()

    # pos -> distance for probes made before the first band
    probed: dict[int, float] = {}

    def probe(ps):
        ps = [p for p in ps if 0 <= p < n and p not in probed]
        if ps:
            for p, v in zip(ps, _distances(data, index, np.array(ps), q, q_sq)):
                probed[p] = float(v)
            stats.evaluations += len(ps)

    # Query identical to a stored row: the radius comes from that row's
    # immediate neighbors.  Otherwise use the rows on either side of the
    # query's insertion point.
    eq_lo = int(np.searchsorted(norms, q_norm, side="left"))
    eq_hi = int(np.searchsorted(norms, q_norm, side="right"))
    self_pos = None
    if eq_hi > eq_lo:
        probe(range(eq_lo, eq_hi))
        self_pos = next((p for p in range(eq_lo, eq_hi) if probed[p] == 0.0), None)
    if self_pos is not None:
        adj = [p for p in (self_pos - 1, self_pos + 1) if 0 <= p < n]
    else:
        adj = [p for p in (eq_lo - 1, eq_lo) if 0 <= p < n]
    probe(adj)
    r0 = min((probed[p] for p in adj), default=0.0)

    step = r0
    if step == 0.0:
        step = index.min_gap if index.min_gap > 0 else index.max_norm - index.min_norm
    radius = r0
    stats.initial_radius = r0

    seen_lo = seen_hi = eq_lo  # contiguous block of positions already scanned
    cand_pos: list[np.ndarray] = []
    cand_dist: list[np.ndarray] = []
    while True:
        stats.rounds += 1
        s = _slack(q_norm, radius)
        band = band_positions(index, q_norm - radius - s, q_norm + radius + s)
        lo, hi = min(band.start, seen_lo), max(band.stop, seen_hi)
        fresh = np.concatenate([np.arange(lo, seen_lo), np.arange(seen_hi, hi)]).astype(np.int64)
        seen_lo, seen_hi = lo, hi
        if fresh.size:
            known = np.fromiter((p in probed for p in fresh.tolist()), bool, fresh.size)
            todo = fresh[~known]
            if todo.size:
                cand_pos.append(todo)
                cand_dist.append(_distances(data, index, todo, q, q_sq))
                stats.evaluations += int(todo.size)

        covered = lo == 0 and hi == n
        found = sum(c.size for c in cand_pos) + len(probed)
        if found >= k:
            all_d = np.concatenate(cand_dist + [np.fromiter(probed.values(), float, len(probed))])
            kth = np.partition(all_d, k - 1)[k - 1]
            if kth <= radius:
                break
        if covered:
            break
        radius += step

    stats.final_radius = radius
    pos = np.concatenate(cand_pos + [np.fromiter(probed.keys(), np.int64, len(probed))])
    dist = np.concatenate(cand_dist + [np.fromiter(probed.values(), float, len(probed))])
    stats.unique_positions = int(np.unique(pos).size)
    orig = index.order[pos]
    top = np.lexsort((orig, dist))[:k]
    result = [Neighbor(int(orig[i]), float(dist[i])) for i in top]
    if return_stats:
        return result, stats
    return result


def knn_of_row(index, data, original_index, k, return_stats=False):
    """k nearest neighbors of dataset row ``original_index`` (the row itself included)."""
    ordered_pos_of(index, original_index)
    return knn_exact(index, data, data.rows[original_index], k, return_stats=return_stats)


def range_search(index, data, query, r) -> list[Neighbor]:
    """All rows within distance ``r`` of ``query``, ordered by (distance, original index).

    Only rows whose norm falls in ``[||q|| - r, ||q|| + r]`` are evaluated.
    """
    index.check_binding(data)
    if not (math.isfinite(r) and r >= 0):
        raise InvalidInputError(f"radius must be a finite value >= 0, got {r!r}")
    q = _validate_query(query, index.d)
    q_sq = _sq_norm(q)
    q_norm = math.sqrt(q_sq)
    s = _slack(q_norm, r)
    band = band_positions(index, q_norm - r - s, q_norm + r + s)
    if not band:
        return []
    pos = np.arange(band.start, band.stop)
    dist = _distances(data, index, pos, q, q_sq)
    keep = dist <= r
    orig = index.order[pos[keep]]
    dist = dist[keep]
    top = np.lexsort((orig, dist))
    return [Neighbor(int(orig[i]), float(dist[i])) for i in top]
