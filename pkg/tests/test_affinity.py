import numpy as np
import pytest
import scipy.sparse as sp

from transduct.affinity import AffinityGraph, build_affinity, psd_check
from transduct.errors import InvalidKError, TooLargeError

from conftest import unit_rows
from oracles import clamped_naive, gram_naive, knn_naive


class TestDenseModes:
    def test_identical_rows_cosine_one(self):
        f = np.array([[1.0, 0.0], [1.0, 0.0]])
        g = build_affinity(f, mode="gram")
        assert g.weights[0, 1] == pytest.approx(1.0)

    def test_orthogonal_rows_cosine_zero(self):
        f = np.array([[1.0, 0.0], [0.0, 1.0]])
        for mode in ("gram", "clamped"):
            g = build_affinity(f, mode=mode)
            assert g.weights[0, 1] == 0.0

    def test_gram_matches_naive(self, rng):
        f = unit_rows(rng, 4, 6)
        g = build_affinity(f, mode="gram")
        np.testing.assert_allclose(g.weights, gram_naive(f), atol=1e-12)

    def test_clamped_matches_naive(self, rng):
        f = unit_rows(rng, 9, 5)
        g = build_affinity(f, mode="clamped")
        np.testing.assert_allclose(g.weights, clamped_naive(f), atol=1e-12)
        assert g.weights.min() >= 0.0

    def test_gram_bit_symmetric(self, rng):
        f = unit_rows(rng, 37, 12)
        w = build_affinity(f, mode="gram").weights
        assert np.array_equal(w, w.T)

    def test_diagonal_is_self_similarity(self, rng):
        f = unit_rows(rng, 6, 4)
        for mode in ("gram", "clamped"):
            w = build_affinity(f, mode=mode).weights
            np.testing.assert_allclose(np.diag(w), 1.0, atol=1e-12)

    def test_gram_records_negatives(self, rng):
        f = unit_rows(rng, 20, 3)
        g = build_affinity(f, mode="gram")
        assert g.has_negative == bool(gram_naive(f).min() < 0)


class TestKnnMode:
    def test_matches_naive_dense_equivalent(self, rng):
        for trial in range(5):
            r = np.random.default_rng(trial)
            f = unit_rows(r, 14, 5)
            g = build_affinity(f, mode="knn", k_neighbors=3)
            np.testing.assert_allclose(g.weights.toarray(), knn_naive(f, 3), atol=1e-12)

    def test_zero_diagonal(self, rng):
        f = unit_rows(rng, 10, 4)
        w = build_affinity(f, mode="knn", k_neighbors=2).weights
        assert w.diagonal().max() == 0.0

    def test_row_entry_counts(self, rng):
        f = unit_rows(rng, 25, 6)
        k = 3
        w = build_affinity(f, mode="knn", k_neighbors=k).weights
        counts = np.diff(w.indptr)
        assert (counts >= k).all() and (counts <= 24).all()

    def test_weights_nonnegative(self, rng):
        f = unit_rows(rng, 30, 3)  # low d gives plenty of negative cosines
        w = build_affinity(f, mode="knn", k_neighbors=4).weights
        assert w.data.min() >= 0.0

    def test_symmetric(self, rng):
        f = unit_rows(rng, 18, 4)
        w = build_affinity(f, mode="knn", k_neighbors=3).weights
        assert (w != w.T).nnz == 0

    def test_tie_break_lower_index(self):
        # rows 1 and 2 are identical, so either is an equally good neighbor
        # of row 0; the lower index must win
        f = np.array([[1.0, 0.0], [0.8, 0.6], [0.8, 0.6], [0.0, 1.0]])
        f = f / np.linalg.norm(f, axis=1, keepdims=True)
        w = build_affinity(f, mode="knn", k_neighbors=1).weights
        row0 = w.getrow(0)
        assert 1 in row0.indices

    def test_k_clamped_to_n_minus_one(self):
        f = np.array([[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]])
        w = build_affinity(f, mode="knn", k_neighbors=50).weights
        assert (np.diff(w.indptr) <= 2).all()

    def test_single_sample_empty_graph(self):
        w = build_affinity(np.array([[1.0, 0.0]]), mode="knn", k_neighbors=3).weights
        assert w.nnz == 0

    def test_invalid_k(self, rng):
        f = unit_rows(rng, 5, 3)
        with pytest.raises(InvalidKError):
            build_affinity(f, mode="knn", k_neighbors=0)
        with pytest.raises(InvalidKError):
            build_affinity(f, mode="knn", k_neighbors=None)


class TestPermutationEquivariance:
    def test_dense(self, rng):
        f = unit_rows(rng, 12, 5)
        perm = rng.permutation(12)
        w = build_affinity(f, mode="clamped").weights
        wp = build_affinity(f[perm], mode="clamped").weights
        np.testing.assert_allclose(wp, w[np.ix_(perm, perm)], atol=1e-12)

    def test_knn(self, rng):
        f = unit_rows(rng, 12, 5)
        perm = rng.permutation(12)
        w = build_affinity(f, mode="knn", k_neighbors=3).weights.toarray()
        wp = build_affinity(f[perm], mode="knn", k_neighbors=3).weights.toarray()
        np.testing.assert_allclose(wp, w[np.ix_(perm, perm)], atol=1e-12)


class TestPsdCheck:
    def test_gram_is_psd(self, rng):
        for n, d in ((16, 4), (64, 8), (512, 32)):
            f = unit_rows(np.random.default_rng(n), n, d)
            ok, smallest = psd_check(build_affinity(f, mode="gram"))
            assert ok, f"gram graph not PSD at n={n}: {smallest}"
            assert smallest >= -1e-9

    def test_known_indefinite_matrix(self):
        g = AffinityGraph(np.array([[0.0, 1.0], [1.0, 0.0]]), mode="gram")
        ok, smallest = psd_check(g)
        assert not ok
        assert smallest == pytest.approx(-1.0, abs=1e-12)

    def test_too_large_guard(self):
        g = AffinityGraph(sp.csr_matrix((5000, 5000)), mode="knn")
        with pytest.raises(TooLargeError):
            psd_check(g)

    def test_knn_reports_only(self, rng):
        # clustered data; eigenvalue is reported, nothing asserted on sign
        centers = unit_rows(rng, 3, 8)
        labels = rng.integers(0, 3, 60)
        x = 3.0 * centers[labels] + rng.standard_normal((60, 8))
        f = x / np.linalg.norm(x, axis=1, keepdims=True)
        ok, smallest = psd_check(build_affinity(f, mode="knn", k_neighbors=3))
        assert np.isfinite(smallest)


class TestThreadedConstruction:
    def test_threads_bit_identical(self, rng):
        # block partition is fixed, so any thread count gives the same bits
        f = unit_rows(rng, 2100, 16)
        w1 = build_affinity(f, mode="clamped", threads=1).weights
        w8 = build_affinity(f, mode="clamped", threads=8).weights
        assert np.array_equal(w1, w8)
        k1 = build_affinity(f, mode="knn", k_neighbors=3, threads=1).weights
        k8 = build_affinity(f, mode="knn", k_neighbors=3, threads=8).weights
        assert (k1 != k8).nnz == 0
        assert np.array_equal(k1.data, k8.data)
