"""
Exact nearest neighbors with norm bands
=======================================

``knn_exact`` only computes a dot product per candidate and only looks at
rows whose norm is close to the query's.  The result always matches an
exhaustive scan; the stats show how much of the dataset was touched.
"""

import numpy as np

from normindex import Dataset, build_index, knn_exact, nnsa_radius, oracle_knn, ordered_pos_of, range_search

rng = np.random.default_rng(1)
data = Dataset(rng.uniform(-1, 1, size=(5000, 4)))
index = build_index(data)

# the starting radius for a stored row: distance to its norm-order neighbors
band = nnsa_radius(index, data, ordered_pos_of(index, 42))
print(f"row 42: norm {band.center_norm:.4f}, radius {band.radius:.4f}")

query = rng.uniform(-1, 1, size=4)
neighbors, stats = knn_exact(index, data, query, k=5, return_stats=True)
for nb in neighbors:
    print(nb)
print(f"evaluated {stats.evaluations} of {data.n} rows in {stats.rounds} band(s)")

brute = oracle_knn(data, query, 5)
print("same indices as exhaustive scan:",
      [nb.original_index for nb in neighbors] == [nb.original_index for nb in brute])

# everything within 0.2 of the query
print(len(range_search(index, data, query, 0.2)), "rows within 0.2")
