import numpy as np
import pytest

from normindex import Dataset, InvalidInputError, evaluate, fit, oracle_predict, predict
from normindex.classifier import majority_vote
from normindex.harness import generate, train_test_split
from normindex.search import Neighbor


def test_fit_iris(iris):
    model = fit(iris)
    assert model.index.n == 150
    assert fit(iris).index == model.index


def test_fit_single_row():
    model = fit(Dataset([[1.0, 2.0]], labels=["x"]))
    assert predict(model, [9.0, 9.0], 1) == "x"


def test_fit_requires_labels():
    with pytest.raises(InvalidInputError):
        fit(Dataset([[1.0]]))


def test_single_label(rng):
    data = Dataset(rng.normal(size=(20, 3)), labels=["A"] * 20)
    model = fit(data)
    for k in (1, 4, 20):
        assert predict(model, rng.normal(size=3), k) == "A"


def test_k1_is_nearest_label(rng):
    data = Dataset(rng.normal(size=(40, 2)), labels=list(rng.integers(0, 3, 40)))
    model = fit(data)
    for _ in range(20):
        q = rng.normal(size=2)
        nearest = np.argmin(np.linalg.norm(data.rows - q, axis=1))
        assert predict(model, q, 1) == data.labels[nearest]


def test_k_equals_n_gives_global_majority(rng):
    labels = ["a"] * 7 + ["b"] * 5 + ["c"] * 3
    data = Dataset(rng.normal(size=(15, 2)), labels=labels)
    model = fit(data)
    for _ in range(10):
        assert predict(model, rng.normal(size=2) * 10, 15) == "a"


def test_k_too_large():
    model = fit(Dataset([[1.0], [2.0]], labels=[0, 1]))
    with pytest.raises(InvalidInputError):
        predict(model, [1.0], 3)


class TestVote:
    def test_majority(self):
        labels = ["a", "b", "b"]
        nbs = [Neighbor(0, 0.1), Neighbor(1, 0.5), Neighbor(2, 0.6)]
        assert majority_vote(labels, nbs) == "b"

    def test_tie_goes_to_smaller_summed_distance(self):
        labels = ["a", "b", "a", "b"]
        nbs = [Neighbor(1, 0.1), Neighbor(0, 0.2), Neighbor(3, 0.3), Neighbor(2, 0.4)]
        # a: 0.2 + 0.4 = 0.6, b: 0.1 + 0.3 = 0.4
        assert majority_vote(labels, nbs) == "b"

    def test_full_tie_goes_to_smaller_label(self):
        labels = ["b", "a"]
        assert majority_vote(labels, [Neighbor(0, 1.0), Neighbor(1, 1.0)]) == "a"


def test_iris_matches_oracle(iris):
    train, test = train_test_split(iris)
    model = fit(train)
    for k in (1, 3, 5, 7):
        for row in test.rows:
            assert predict(model, row, k) == oracle_predict(train, row, k)


def test_evaluate_self(iris):
    # iris has duplicate rows, so use deduplicated data for the self-match property
    rows, first = np.unique(iris.rows, axis=0, return_index=True)
    data = Dataset(rows, labels=iris.labels[first])
    assert evaluate(fit(data), data, 1) == 1.0


def test_evaluate_disjoint_labels(rng):
    train = Dataset(rng.normal(size=(10, 2)), labels=["x"] * 10)
    test = Dataset(rng.normal(size=(5, 2)), labels=["y"] * 5)
    assert evaluate(fit(train), test, 3) == 0.0


def test_evaluate_iris_equals_oracle_accuracy(iris):
    train, test = train_test_split(iris)
    model = fit(train)
    for k in (1, 5):
        oracle = np.mean([oracle_predict(train, r, k) == t for r, t in zip(test.rows, test.labels)])
        assert evaluate(model, test, k) == oracle


def test_evaluate_dimension_mismatch():
    model = fit(Dataset([[1.0, 2.0]], labels=["a"]))
    with pytest.raises(InvalidInputError):
        evaluate(model, Dataset([[1.0]], labels=["a"]), 1)


def test_permutation_invariance():
    rng = np.random.default_rng(5)
    data = generate(120, 3, seed=9, kind="blobs", centers=[[0, 0, 0], [2, 2, 2], [0, 3, 0]])
    perm = rng.permutation(data.n)
    shuffled = Dataset(data.rows[perm], labels=data.labels[perm])
    a, b = fit(data), fit(shuffled)
    for q in rng.normal(1, 2, size=(40, 3)):
        for k in (1, 4, 9):
            assert predict(a, q, k) == predict(b, q, k)


def test_duplicate_rows_deterministic():
    data = Dataset([[0.0, 0.0], [1.0, 1.0], [1.0, 1.0], [5.0, 5.0]], labels=["a", "b", "c", "d"])
    model = fit(data)
    # rows 1 and 2 are identical; k=1 takes the lower original index
    assert [predict(model, [1.0, 1.0], 1) for _ in range(5)] == ["b"] * 5
