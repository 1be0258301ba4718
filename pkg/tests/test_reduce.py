import numpy as np
import pytest
from scipy import sparse

from conftest import euclidean_matrix, knn_sets, make_blobs_lowrank
from srtopic.embedding_io import EmbeddingMatrix, l2_normalize
from srtopic.errors import TooFewPoints
from srtopic.reduce import (
    UmapParams,
    fit_curve_params,
    fuzzy_memberships,
    knn_graph,
    optimize_layout,
    reduce,
    symmetrize,
)

# frozen output of fit_curve_params at the defaults, used as a regression anchor
GOLDEN_A, GOLDEN_B = 1.9328090884358176, 0.790494660711966


def unit_matrix(rows):
    rows = np.asarray(rows, dtype=np.float64)
    ids = [f"p{i}" for i in range(rows.shape[0])]
    return EmbeddingMatrix(doc_ids=ids, rows=rows)


class TestKnnGraph:
    def test_hand_dot_products(self):
        s = 1 / np.sqrt(2)
        m = unit_matrix([[1, 0], [0, 1], [s, s]])
        idx, d = knn_graph(m, 1)
        assert idx[0, 0] == 2
        assert d[0, 0] == pytest.approx(1 - s, abs=1e-12)

    def test_duplicate_points_give_zero_distance(self):
        m = unit_matrix([[1, 0], [1, 0], [0, 1]])
        idx, d = knn_graph(m, 1)
        assert idx[0, 0] == 1 and d[0, 0] == pytest.approx(0.0, abs=1e-12)

    def test_full_neighbor_lists(self):
        rng = np.random.default_rng(0)
        m = l2_normalize(unit_matrix(rng.normal(size=(6, 4))))
        idx, d = knn_graph(m, 5)
        assert idx.shape == (6, 5)
        for i in range(6):
            assert i not in idx[i]
            assert np.all(np.diff(d[i]) >= 0)

    def test_too_few_points(self):
        m = unit_matrix([[1, 0], [0, 1]])
        with pytest.raises(TooFewPoints):
            knn_graph(m, 2)


class TestFuzzyMemberships:
    def test_nearest_neighbor_weight_is_one(self):
        d = np.array([[0.2, 0.5, 0.9]])
        w, rho, _ = fuzzy_memberships(d, 3)
        assert w[0, 0] == 1.0
        assert rho[0] == 0.2

    def test_equidistant_neighbors_all_weight_one(self):
        d = np.full((1, 5), 0.3)
        w, _, _ = fuzzy_memberships(d, 5)
        assert np.allclose(w, 1.0)

    def test_weight_formula(self):
        d = np.array([[0.1, 0.4, 0.7, 1.1]])
        w, rho, sigma = fuzzy_memberships(d, 4)
        expect = np.exp(-np.maximum(d - rho[:, None], 0) / sigma[:, None])
        assert np.allclose(w, expect, atol=1e-12)
        # a neighbor at rho + sigma*ln2 would get weight exactly 1/2
        probe = rho[0] + sigma[0] * np.log(2.0)
        assert np.exp(-max(0.0, probe - rho[0]) / sigma[0]) == pytest.approx(0.5, rel=1e-9)

    def test_calibration_hits_target_mass(self):
        rng = np.random.default_rng(1)
        d = np.sort(rng.uniform(0.05, 1.0, size=(40, 15)), axis=1)
        w, _, _ = fuzzy_memberships(d, 15)
        assert np.allclose(w.sum(axis=1), np.log2(15), atol=1e-6)


class TestSymmetrize:
    def _graph(self, idx, w, n):
        return symmetrize(np.asarray(idx), np.asarray(w)).toarray()

    def test_one_directional_edge(self):
        g = self._graph([[1], [0]], [[1.0], [0.0]], 2)
        assert g[0, 1] == 1.0 and g[1, 0] == 1.0

    def test_half_half(self):
        g = self._graph([[1], [0]], [[0.5], [0.5]], 2)
        assert g[0, 1] == pytest.approx(0.75)

    def test_zero_edges_absent(self):
        m = symmetrize(np.array([[1], [0]]), np.array([[0.0], [0.0]]))
        assert m.nnz == 0

    def test_exactly_symmetric(self):
        rng = np.random.default_rng(2)
        idx = np.array([rng.permutation(19)[:6] for _ in range(20)])
        idx = np.where(idx >= np.arange(20)[:, None], idx + 1, idx)  # avoid self
        w = rng.uniform(0, 1, idx.shape)
        m = symmetrize(idx, w)
        diff = (m - m.T).toarray()
        assert np.all(diff == 0.0)
        assert m.toarray().max() <= 1.0 and m.toarray().min() >= 0.0


class TestCurveFit:
    def test_golden_values_at_default(self):
        a, b = fit_curve_params(0.0)
        assert a == pytest.approx(GOLDEN_A, rel=1e-6)
        assert b == pytest.approx(GOLDEN_B, rel=1e-6)

    def test_kernel_value_at_zero(self):
        a, b = fit_curve_params(0.0)
        assert 1.0 / (1.0 + a * 0.0 ** (2 * b)) == pytest.approx(1.0, abs=1e-3)

    def test_larger_min_dist_smaller_a(self):
        a0, _ = fit_curve_params(0.0)
        a5, _ = fit_curve_params(0.5)
        assert a5 < a0

    def test_fit_tracks_target(self):
        a, b = fit_curve_params(0.0)
        xs = np.linspace(0.05, 3, 50)
        fitted = 1.0 / (1.0 + a * xs ** (2 * b))
        target = np.exp(-xs)
        assert np.mean((fitted - target) ** 2) < 5e-3


def two_clique_graph(per_clique=20):
    n = 2 * per_clique
    rows, cols, data = [], [], []
    for block in range(2):
        lo = block * per_clique
        for i in range(per_clique):
            for j in range(per_clique):
                if i != j:
                    rows.append(lo + i)
                    cols.append(lo + j)
                    data.append(1.0)
    return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))


class TestOptimizeLayout:
    def test_two_cliques_separate(self):
        graph = two_clique_graph()
        params = UmapParams(n_components=2, n_epochs=150, seed=42)
        a, b = fit_curve_params(0.0)
        y = optimize_layout(graph, params, a, b)
        d = euclidean_matrix(y)
        within = np.concatenate([d[:20, :20].ravel(), d[20:, 20:].ravel()])
        across = d[:20, 20:].ravel()
        assert within.mean() < across.mean()

    def test_deterministic(self):
        graph = two_clique_graph(10)
        params = UmapParams(n_components=3, n_epochs=50, seed=7)
        a, b = fit_curve_params(0.0)
        y1 = optimize_layout(graph, params, a, b)
        y2 = optimize_layout(graph, params, a, b)
        assert y1.tobytes() == y2.tobytes()

    def test_zero_epochs_returns_seeded_init(self):
        graph = two_clique_graph(5)
        params = UmapParams(n_components=4, n_epochs=0, seed=11)
        a, b = fit_curve_params(0.0)
        y = optimize_layout(graph, params, a, b)
        expect = np.random.default_rng(11).uniform(-10, 10, size=(10, 4))
        assert np.array_equal(y, expect)


class TestReduce:
    def test_byte_determinism(self):
        pts, _ = make_blobs_lowrank(per_blob=10)
        m = l2_normalize(unit_matrix(pts))
        params = UmapParams(n_neighbors=5, n_epochs=80, seed=42)
        assert reduce(m, params).tobytes() == reduce(m, params).tobytes()

    def test_neighbor_recall_on_blobs(self):
        pts, _ = make_blobs_lowrank()
        m = l2_normalize(unit_matrix(pts))
        y = reduce(m, UmapParams(seed=42))
        d_in = 1.0 - m.rows @ m.rows.T
        recall = np.mean(
            [
                len(a & b) / 10
                for a, b in zip(knn_sets(d_in, 10), knn_sets(euclidean_matrix(y), 10))
            ]
        )
        assert recall >= 0.8

    def test_guards_small_inputs(self):
        m = l2_normalize(unit_matrix(np.random.default_rng(0).normal(size=(5, 3))))
        with pytest.raises(TooFewPoints):
            reduce(m, UmapParams(n_neighbors=5))
