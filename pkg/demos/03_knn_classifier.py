"""
KNN classification on iris
==========================

The indexed classifier and the exhaustive-scan classifier use the same
vote rule, so their predictions agree query for query.
"""

from normindex import evaluate, fit, oracle_predict
from normindex.harness import load_iris, train_test_split

iris = load_iris()
train, test = train_test_split(iris)  # fixed 80/20 split
model = fit(train)

for k in (1, 3, 5, 7):
    acc = evaluate(model, test, k)
    brute = sum(oracle_predict(train, r, k) == t for r, t in zip(test.rows, test.labels)) / test.n
    print(f"k={k}: indexed {acc:.3f}  exhaustive {brute:.3f}")
