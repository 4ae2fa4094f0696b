"""Exhaustive-scan baselines used to check the indexed queries.

Nothing here touches the norm index: distances come straight from
coordinate differences over every row.
"""

from collections import Counter

import numpy as np

from .errors import InvalidInputError
from .search import Neighbor


def _direct_distances(rows, query):
    rows = np.asarray(rows, dtype=np.float64)
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (rows.shape[1],):
        raise InvalidInputError(f"query must have {rows.shape[1]} coordinates")
    diff = rows - query
    return np.sqrt((diff * diff).sum(axis=1))


def _rows(data):
    return data.rows if hasattr(data, "rows") else np.asarray(data, dtype=np.float64)


def oracle_knn(data, query, k):
    rows = _rows(data)
    n = rows.shape[0]
    if not 1 <= k <= n:
        raise InvalidInputError(f"k must be in [1, {n}], got {k}")
    dist = _direct_distances(rows, query)
    order = np.lexsort((np.arange(n), dist))[:k]
    return [Neighbor(int(i), float(dist[i])) for i in order]


def oracle_range(data, query, r):
    if r < 0:
        raise InvalidInputError(f"radius must be >= 0, got {r}")
    rows = _rows(data)
    dist = _direct_distances(rows, query)
    hits = np.flatnonzero(dist <= r)
    hits = hits[np.lexsort((hits, dist[hits]))]
    return [Neighbor(int(i), float(dist[i])) for i in hits]


def oracle_predict(data, query, k):
    """Majority label of the k nearest rows found by exhaustive scan.

    Ties go to the label with the smaller summed distance, then the
    smaller label.
    """
    if data.labels is None:
        raise InvalidInputError("dataset has no labels")
    votes = Counter()
    total = {}
    for nb in oracle_knn(data, query, k):
        lab = data.labels[nb.original_index]
        votes[lab] += 1
        total[lab] = total.get(lab, 0.0) + nb.distance
    return min(votes, key=lambda lab: (-votes[lab], total[lab], lab))
