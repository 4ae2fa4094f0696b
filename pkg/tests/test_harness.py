import csv
import io

import numpy as np
import pytest

from normindex import Dataset, ParseError, oracle_knn, oracle_range
from normindex.harness import (
    BenchRecord,
    bench_build,
    bench_csv,
    bench_knn,
    cluster_report,
    format_csv,
    generate,
    load_csv,
    parse_csv,
    train_test_split,
)


class TestCsv:
    def test_iris(self, iris):
        assert (iris.n, iris.d) == (150, 4)
        assert len(set(iris.labels)) == 3

    def test_single_line(self, tmp_path):
        p = tmp_path / "one.csv"
        p.write_text("1.0,2.0\n")
        data = load_csv(p)
        assert (data.n, data.d) == (1, 2)
        assert data.labels is None

    def test_header_skipped(self):
        data = parse_csv("x,y,label\n1,2,a\n3,4,b\n", labeled=True)
        np.testing.assert_array_equal(data.rows, [[1, 2], [3, 4]])
        assert list(data.labels) == ["a", "b"]

    def test_numeric_labels_kept_as_text(self):
        data = parse_csv("1,2,0\n3,4,1\n", labeled=True)
        assert list(data.labels) == ["0", "1"]

    def test_ragged(self):
        with pytest.raises(ParseError) as exc:
            parse_csv("1,2\n3,4\n5\n6,7\n")
        assert exc.value.lineno == 3

    @pytest.mark.parametrize("text, line", [("1,2\n3,nan\n", 2), ("1,x\n2,3\n4,y\n", 3), ("1,inf\n", 1)])
    def test_bad_values(self, text, line):
        with pytest.raises(ParseError) as exc:
            parse_csv(text)
        assert exc.value.lineno == line

    def test_empty(self):
        with pytest.raises(ParseError):
            parse_csv("")
        with pytest.raises(ParseError):
            parse_csv("a,b\n")

    def test_format_round_trip(self):
        rows = [(1, "nnsa", 0.1 + 0.2), (2, "random", 1e-300)]
        text = format_csv(["k", "arm", "wcss"], rows)
        parsed = list(csv.reader(io.StringIO(text)))[1:]
        again = format_csv(["k", "arm", "wcss"], [(int(a), b, float(c)) for a, b, c in parsed])
        assert again == text


class TestGenerate:
    def test_reproducible(self):
        a = generate(50, 4, seed=3)
        b = generate(50, 4, seed=3)
        np.testing.assert_array_equal(a.rows, b.rows)
        assert not np.array_equal(a.rows, generate(50, 4, seed=4).rows)

    def test_blobs(self):
        centers = np.array([[0.0, 0.0], [100.0, 100.0]])
        data = generate(400, 2, seed=1, kind="blobs", centers=centers, spread=1.0)
        labels = np.asarray(data.labels, dtype=int)
        assert set(labels) == {0, 1}
        assert (np.linalg.norm(data.rows - centers[labels], axis=1) < 10).all()

    def test_shape(self):
        data = generate(1000, 200, seed=0)
        assert data.rows.shape == (1000, 200)

    @pytest.mark.parametrize("kwargs", [dict(n=0, d=2), dict(n=2, d=0), dict(n=2, d=2, kind="x"),
                                        dict(n=2, d=2, kind="blobs")])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            generate(**kwargs)


class TestOracle:
    def test_hand_checked(self):
        data = Dataset([[0.0, 0.0], [3.0, 4.0], [1.0, 0.0]])
        assert oracle_knn(data, [0.0, 0.0], 3) == [(0, 0.0), (2, 1.0), (1, 5.0)]
        assert oracle_range(data, [0.0, 0.0], 1.0) == [(0, 0.0), (2, 1.0)]

    def test_ties_by_index(self):
        data = Dataset([[1.0], [-1.0], [1.0]])
        assert [nb.original_index for nb in oracle_knn(data, [0.0], 3)] == [0, 1, 2]

    def test_k_equals_n_sorted(self, rng):
        data = Dataset(rng.normal(size=(20, 2)))
        out = oracle_knn(data, [0.0, 0.0], 20)
        assert sorted(nb.original_index for nb in out) == list(range(20))
        assert [nb.distance for nb in out] == sorted(nb.distance for nb in out)


def test_train_test_split(iris):
    train, test = train_test_split(iris)
    assert (train.n, test.n) == (120, 30)
    a, b = train_test_split(iris)
    np.testing.assert_array_equal(train.rows, a.rows)
    both = np.vstack([train.rows, test.rows])
    assert sorted(map(tuple, both)) == sorted(map(tuple, iris.rows))


class TestBench:
    def test_build_records(self):
        recs = bench_build("dims", [2, 4], reps=2, fixed=500)
        assert [r.param for r in recs] == [2, 4]
        assert all(r.seconds >= 0 and r.repetitions == 2 for r in recs)

    def test_empty_sweep(self):
        with pytest.raises(ValueError):
            bench_build("size", [], reps=1)

    def test_csv_format(self):
        text = bench_csv([BenchRecord(10, "nnsa", 0.5, 3)])
        assert text == "param,variant,seconds\n10,nnsa,0.5\n"

    def test_knn_arms_agree(self, iris):
        train, test = train_test_split(iris)
        res = bench_knn(train, test, ks=(1, 3, 5, 7), reps=1)
        for k in (1, 3, 5, 7):
            assert res.accuracy[(k, "nnsa")] == res.accuracy[(k, "brute")]
            assert {r.variant for r in res.records if r.param == k} == {"nnsa", "brute"}

    def test_knn_threads(self, iris):
        train, test = train_test_split(iris)
        one = bench_knn(train, test, ks=(3,), reps=1)
        four = bench_knn(train, test, ks=(3,), reps=1, threads=4)
        assert one.accuracy == four.accuracy


class TestClusterReport:
    def test_iris(self, iris):
        rep = cluster_report(iris, 1, 10, seed=0)
        assert len(rep.rows) == len({(k, arm) for k, arm, _ in rep.rows})
        nnsa = [w for _, w in rep.curve("nnsa")]
        assert all(b <= a for a, b in zip(nnsa, nnsa[1:]))
        rand = [w for _, w in rep.curve("random")]
        assert all(b <= a * 1.05 for a, b in zip(rand, rand[1:]))
        assert rep.seed_count >= 3

    def test_text_reproducible(self, iris):
        a = cluster_report(iris, 2, 5, seed=4).to_text()
        b = cluster_report(iris, 2, 5, seed=4).to_text()
        assert a == b
        assert a.splitlines()[0] == "k,arm,wcss"
        assert "seed_count=" in a and "k_opt_nnsa=" in a and "k_opt_random=" in a

    def test_nnsa_arm_capped_at_seed_count(self):
        data = Dataset([[0.0], [0.0], [0.0], [9.0]])
        rep = cluster_report(data, 1, 3)
        assert max(k for k, _ in rep.curve("nnsa")) <= rep.seed_count
        assert [k for k, _ in rep.curve("random")] == [1, 2, 3]
