"""Norm-ordered index for exact nearest-neighbor search, KNN and k-means seeding."""

from .classifier import KnnModel, evaluate, fit, predict
from .core import (
    Dataset,
    NormIndex,
    band_positions,
    build_index,
    dumps_index,
    euclidean_norm,
    load_index,
    loads_index,
    ordered_pos_of,
    original_of,
    save_index,
)
from .errors import (
    BindingError,
    InvalidInputError,
    NormIndexError,
    ParseError,
    UndefinedSimilarityError,
)
from .kmeans import (
    ClusteringResult,
    SeedReport,
    agglomerative_reduce,
    elbow_select,
    kmeans_nnsa,
    kmeans_random,
    lloyd,
    seed_centroids,
    wcss,
)
from .oracle import oracle_knn, oracle_predict, oracle_range
from .search import (
    Neighbor,
    SearchBand,
    cosine_similarity,
    distance_from_norms,
    knn_exact,
    knn_of_row,
    nnsa_radius,
    range_search,
)

__version__ = "0.1.0"
