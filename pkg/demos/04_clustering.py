"""
Band seeding, merging and the elbow
===================================

Seeding walks the norm index outward from its middle row, one seed per
search band.  The seeds are merged pairwise down to k centroids and then
refined with Lloyd iterations.  WCSS against k picks the elbow.
"""

from normindex import build_index, elbow_select, kmeans_nnsa, seed_centroids
from normindex.harness import cluster_report, load_iris

iris = load_iris()
index = build_index(iris)
seeds = seed_centroids(index, iris)
print(f"{seeds.count} seeds, members per seed: {seeds.weights.tolist()}")

res = kmeans_nnsa(iris, 3, index=index, seeds=seeds)
print(f"k=3: WCSS {res.wcss:.3f} after {res.iterations} iterations")

report = cluster_report(iris, 1, 10, seed=0)
print(report.to_text())
print("elbow (band-seeded arm):", elbow_select(report.curve("nnsa")))
