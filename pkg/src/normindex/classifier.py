"""k-nearest-neighbor classification on top of :func:`knn_exact`."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, NormIndex, build_index
from .errors import InvalidInputError
from .search import Neighbor, knn_exact


@dataclass(frozen=True)
class KnnModel:
    data: Dataset
    index: NormIndex
    k_default: int = 5

    def predict(self, query, k=None):
        return predict(self, query, k)


def fit(data: Dataset, k_default: int = 5) -> KnnModel:
    """Index a labelled dataset once for repeated prediction."""
    if data.labels is None:
        raise InvalidInputError("training data must carry labels")
    if k_default < 1:
        raise InvalidInputError(f"k_default must be >= 1, got {k_default}")
    return KnnModel(data, build_index(data), k_default)


def majority_vote(labels, neighbors: list[Neighbor]):
    """Most frequent label; ties by smaller summed distance, then smaller label."""
    counts: dict = {}
    sums: dict = {}
    for nb in neighbors:
        lab = labels[nb.original_index]
        counts[lab] = counts.get(lab, 0) + 1
        sums[lab] = sums.get(lab, 0.0) + nb.distance
    return min(counts, key=lambda lab: (-counts[lab], sums[lab], lab))


def predict(model: KnnModel, query, k: int | None = None):
    k = model.k_default if k is None else k
    if not 1 <= k <= model.data.n:
        raise InvalidInputError(f"k must be in [1, {model.data.n}], got {k}")
    neighbors = knn_exact(model.index, model.data, query, k)
    return majority_vote(model.data.labels, neighbors)


def evaluate(model: KnnModel, test: Dataset, k: int | None = None) -> float:
    """Fraction of ``test`` rows whose predicted label matches the true one."""
    if test.labels is None:
        raise InvalidInputError("test data must carry labels")
    if test.d != model.data.d:
        raise InvalidInputError(f"test has d={test.d}, model expects d={model.data.d}")
    hits = sum(predict(model, row, k) == lab for row, lab in zip(test.rows, test.labels))
    return hits / test.n


def predict_many(model: KnnModel, rows, k: int | None = None) -> list:
    return [predict(model, row, k) for row in np.asarray(rows, dtype=np.float64)]
