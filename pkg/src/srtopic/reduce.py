"""Graph-based dimensionality reduction of document embeddings.

Five stages: exact cosine kNN, smooth-neighborhood membership
calibration, fuzzy union symmetrization, low-dimensional kernel curve
fitting, and a negative-sampling SGD layout. Everything is seeded and
single-threaded in the SGD loop, so a given (input, params) pair always
produces bit-identical coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from scipy import sparse

from .embedding_io import EmbeddingMatrix
from .errors import TooFewPoints

_SIGMA_LO = 1e-12
_SIGMA_HI = 1e4
_BISECT_ITERS = 64
_CURVE_SAMPLES = 300
_CURVE_SPAN = 3.0
_GN_ITERS = 64


@dataclass
class UmapParams:
    n_neighbors: int = 15
    n_components: int = 5
    min_dist: float = 0.0
    metric: str = "cosine"
    n_epochs: int = 200
    negative_sample_rate: int = 5
    learning_rate: float = 1.0
    seed: int = 42

    def __post_init__(self) -> None:
        if self.n_neighbors < 2:
            raise ValueError("n_neighbors must be at least 2")
        if self.n_components < 1:
            raise ValueError("n_components must be at least 1")
        if self.min_dist < 0:
            raise ValueError("min_dist must be non-negative")
        if self.metric != "cosine":
            raise ValueError("only the cosine metric is supported")


def knn_graph(m: EmbeddingMatrix, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact k nearest neighbors under cosine distance (rows must be unit norm).

    Returns (indices, distances), each (n, k), distances ascending per
    row with ties broken by lower index; self is excluded.
    """
    n = m.n_docs
    if k >= n:
        raise TooFewPoints(f"k={k} requires more than {n} points")
    if k < 1:
        raise ValueError("k must be positive")
    dist = 1.0 - m.rows @ m.rows.T
    np.maximum(dist, 0.0, out=dist)
    np.fill_diagonal(dist, np.inf)
    # stable argsort breaks distance ties by lower index
    order = np.argsort(dist, axis=1, kind="stable")[:, :k]
    return order, np.take_along_axis(dist, order, axis=1)


def fuzzy_memberships(knn_dists: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Calibrate per-point kernels so each neighborhood has mass log2(k).

    For point i, rho_i is the distance to its nearest neighbor and
    sigma_i solves sum_j exp(-max(0, d_ij - rho_i) / sigma_i) = log2(k)
    by 64 bisection steps on [1e-12, 1e4]. Returns (weights, rho, sigma)
    with weights[i, j] = exp(-max(0, d_ij - rho_i) / sigma_i).
    """
    d = np.asarray(knn_dists, dtype=np.float64)
    rho = d[:, 0].copy()
    excess = np.maximum(d - rho[:, np.newaxis], 0.0)
    target = np.log2(k)

    lo = np.full(d.shape[0], _SIGMA_LO)
    hi = np.full(d.shape[0], _SIGMA_HI)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        mass = np.exp(-excess / mid[:, np.newaxis]).sum(axis=1)
        too_big = mass > target
        hi = np.where(too_big, mid, hi)
        lo = np.where(too_big, lo, mid)
    sigma = 0.5 * (lo + hi)
    weights = np.exp(-excess / sigma[:, np.newaxis])
    return weights, rho, sigma


def symmetrize(knn_idx: np.ndarray, weights: np.ndarray) -> sparse.csr_matrix:
    """Fuzzy union of the directed membership graph: w + w' - w*w'.

    The result is exactly symmetric (each unordered pair is combined
    once and stored in both orientations).
    """
    n, k = knn_idx.shape
    rows = np.repeat(np.arange(n), k)
    cols = knn_idx.ravel()
    g = sparse.coo_matrix((weights.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    g.sum_duplicates()
    t = g.T.tocsr()
    sym = g + t - g.multiply(t)
    sym = sym.tocsr()
    sym.eliminate_zeros()
    return sym


def _curve(x: np.ndarray, a: float, b: float) -> np.ndarray:
    return 1.0 / (1.0 + a * x ** (2.0 * b))


def fit_curve_params(min_dist: float) -> tuple[float, float]:
    """Least-squares fit of 1/(1 + a d^(2b)) to the target fall-off curve.

    Target: 1 for d <= min_dist, exp(-(d - min_dist)) beyond, sampled at
    300 points on [0, 3]; 64 damped Gauss-Newton iterations from (1, 1).
    """
    xs = np.linspace(0.0, _CURVE_SPAN, _CURVE_SAMPLES)
    psi = np.where(xs <= min_dist, 1.0, np.exp(-(xs - min_dist)))
    positive = xs > 0

    def residual(a: float, b: float) -> np.ndarray:
        return _curve(xs, a, b) - psi

    a, b = 1.0, 1.0
    for _ in range(_GN_ITERS):
        r = residual(a, b)
        xp = xs[positive]
        denom = (1.0 + a * xp ** (2.0 * b)) ** 2
        ja = np.zeros_like(xs)
        jb = np.zeros_like(xs)
        ja[positive] = -(xp ** (2.0 * b)) / denom
        jb[positive] = -(2.0 * a * xp ** (2.0 * b) * np.log(xp)) / denom
        jac = np.column_stack([ja, jb])
        jtj = jac.T @ jac
        rhs = -jac.T @ r
        try:
            step = np.linalg.solve(jtj, rhs)
        except np.linalg.LinAlgError:
            break
        base = float(r @ r)
        t = 1.0
        for _ in range(32):
            na, nb = a + t * step[0], b + t * step[1]
            if na > 0 and nb > 0:
                rn = residual(na, nb)
                if float(rn @ rn) <= base:
                    break
            t *= 0.5
        else:
            break
        a, b = a + t * step[0], b + t * step[1]
    return float(a), float(b)


@numba.njit(cache=True)
def _clip(x: float) -> float:
    if x > 4.0:
        return 4.0
    if x < -4.0:
        return -4.0
    return x


@numba.njit(cache=True)
def _layout_epoch(y, heads, tails, weights, coin, negatives, a, b, alpha):
    """One SGD epoch over the directed edge list, in place.

    Each directed edge fires with probability equal to its membership
    weight; a firing edge pulls both endpoints together along the
    attractive gradient and pushes the head away from
    negative_sample_rate random points.
    """
    dim = y.shape[1]
    n_neg = negatives.shape[1]
    for e in range(heads.shape[0]):
        if coin[e] >= weights[e]:
            continue
        i = heads[e]
        j = tails[e]

        d2 = 0.0
        for c in range(dim):
            diff = y[i, c] - y[j, c]
            d2 += diff * diff
        if d2 > 0.0:
            grad_coeff = (-2.0 * a * b * d2 ** (b - 1.0)) / (a * d2 ** b + 1.0)
        else:
            grad_coeff = 0.0
        for c in range(dim):
            grad = _clip(grad_coeff * (y[i, c] - y[j, c]))
            y[i, c] += alpha * grad
            y[j, c] -= alpha * grad

        for s in range(n_neg):
            p = negatives[e, s]
            if p == i:
                continue
            d2 = 0.0
            for c in range(dim):
                diff = y[i, c] - y[p, c]
                d2 += diff * diff
            if d2 > 0.0:
                grad_coeff = (2.0 * b) / ((0.001 + d2) * (a * d2 ** b + 1.0))
            else:
                grad_coeff = 0.0
            for c in range(dim):
                if grad_coeff > 0.0:
                    grad = _clip(grad_coeff * (y[i, c] - y[p, c]))
                else:
                    grad = 4.0
                y[i, c] += alpha * grad


def optimize_layout(
    graph: sparse.csr_matrix,
    params: UmapParams,
    a: float,
    b: float,
) -> np.ndarray:
    """Seeded SGD layout of a symmetric membership graph.

    Coordinates start as uniform noise in [-10, 10]; the learning rate
    decays linearly to zero over the epochs. All randomness comes from
    one seeded generator, so identical seeds give identical outputs.
    """
    n = graph.shape[0]
    rng = np.random.default_rng(params.seed)
    y = rng.uniform(-10.0, 10.0, size=(n, params.n_components))

    coo = graph.tocoo()
    order = np.lexsort((coo.col, coo.row))
    heads = coo.row[order].astype(np.int64)
    tails = coo.col[order].astype(np.int64)
    weights = coo.data[order].astype(np.float64)

    n_edges = heads.shape[0]
    rate = params.negative_sample_rate
    for epoch in range(params.n_epochs):
        alpha = params.learning_rate * (1.0 - epoch / params.n_epochs)
        coin = rng.random(n_edges)
        negatives = rng.integers(0, n, size=(n_edges, rate), dtype=np.int64)
        _layout_epoch(y, heads, tails, weights, coin, negatives, a, b, alpha)
    return y


def reduce(m: EmbeddingMatrix, params: UmapParams) -> np.ndarray:
    """Full reduction pipeline; rows of m must already be unit-normalized."""
    if params.n_neighbors >= m.n_docs:
        raise TooFewPoints(
            f"n_neighbors={params.n_neighbors} requires more than {m.n_docs} points"
        )
    idx, dists = knn_graph(m, params.n_neighbors)
    weights, _, _ = fuzzy_memberships(dists, params.n_neighbors)
    graph = symmetrize(idx, weights)
    a, b = fit_curve_params(params.min_dist)
    return optimize_layout(graph, params, a, b)
