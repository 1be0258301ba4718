"""Traditional topic-model baselines: collapsed-Gibbs LDA and
multiplicative-update NMF on TF-IDF-weighted counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import EmptyCorpus, NegativeInput
from .vectorize import DocTermMatrix

_MU_EPS = 1e-12
_SAMPLE_EVERY = 10


@dataclass
class LdaParams:
    K: int
    alpha: float | None = None  # defaults to 50/K
    beta: float = 0.01
    n_iterations: int = 1000
    burn_in: int = 800
    seed: int = 42

    def __post_init__(self) -> None:
        # K=1 is allowed as the degenerate single-topic collapse
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if self.alpha is None:
            self.alpha = 50.0 / self.K
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.n_iterations < 1:
            raise ValueError("n_iterations must be positive")


@dataclass
class LdaModel:
    phi: np.ndarray    # (K, V) topic-word probabilities
    theta: np.ndarray  # (D, K) doc-topic probabilities
    terms: list[str] = field(default_factory=list)


@dataclass
class NmfParams:
    K: int
    n_iterations: int = 500
    tol: float = 1e-6
    seed: int = 42

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ValueError("K must be at least 1")


@dataclass
class NmfModel:
    W: np.ndarray
    H: np.ndarray
    objective_trace: np.ndarray
    terms: list[str] = field(default_factory=list)


@numba.njit(cache=True)
def _gibbs_sweep(z, doc_of, word_of, n_dk, n_kw, n_k, alpha, beta, v_beta, coin):
    """One full collapsed-Gibbs sweep over every token, in place.

    P(z_i = k) is proportional to (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta)
    with the current token removed from all counts.
    """
    n_topics = n_k.shape[0]
    for i in range(z.shape[0]):
        d = doc_of[i]
        w = word_of[i]
        k_old = z[i]
        n_dk[d, k_old] -= 1
        n_kw[k_old, w] -= 1
        n_k[k_old] -= 1

        total = 0.0
        for k in range(n_topics):
            total += (n_dk[d, k] + alpha) * (n_kw[k, w] + beta) / (n_k[k] + v_beta)
        u = coin[i] * total
        acc = 0.0
        k_new = n_topics - 1
        for k in range(n_topics):
            acc += (n_dk[d, k] + alpha) * (n_kw[k, w] + beta) / (n_k[k] + v_beta)
            if u < acc:
                k_new = k
                break

        z[i] = k_new
        n_dk[d, k_new] += 1
        n_kw[k_new, w] += 1
        n_k[k_new] += 1


def _expand_tokens(dtm: DocTermMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Flatten counts into per-token (doc, word) streams, doc-major with
    ascending term ids inside each doc."""
    csr = dtm.counts
    docs, words = [], []
    for d in range(csr.shape[0]):
        start, end = csr.indptr[d], csr.indptr[d + 1]
        for t, c in zip(csr.indices[start:end], csr.data[start:end]):
            docs.extend([d] * int(c))
            words.extend([int(t)] * int(c))
    return np.array(docs, dtype=np.int64), np.array(words, dtype=np.int64)


def lda_fit(dtm: DocTermMatrix, params: LdaParams, validate_every: int = 0) -> LdaModel:
    """Collapsed Gibbs sampling; phi/theta are smoothed count estimates
    averaged over post-burn-in samples taken every 10 sweeps.

    validate_every > 0 re-checks the count bookkeeping every that many
    sweeps (used by the test suite).
    """
    doc_of, word_of = _expand_tokens(dtm)
    n_tokens = doc_of.shape[0]
    if n_tokens == 0 or dtm.n_docs == 0:
        raise EmptyCorpus("no tokens to sample")
    n_docs, n_terms = dtm.n_docs, dtm.n_terms
    k_topics = params.K

    rng = np.random.default_rng(params.seed)
    z = rng.integers(0, k_topics, size=n_tokens, dtype=np.int64)

    n_dk = np.zeros((n_docs, k_topics), dtype=np.int64)
    n_kw = np.zeros((k_topics, n_terms), dtype=np.int64)
    n_k = np.zeros(k_topics, dtype=np.int64)
    np.add.at(n_dk, (doc_of, z), 1)
    np.add.at(n_kw, (z, word_of), 1)
    np.add.at(n_k, z, 1)

    doc_len = np.asarray(dtm.counts.sum(axis=1)).ravel().astype(np.float64)
    alpha, beta = float(params.alpha), float(params.beta)
    v_beta = beta * n_terms

    phi_acc = np.zeros((k_topics, n_terms))
    theta_acc = np.zeros((n_docs, k_topics))
    n_samples = 0

    def take_sample() -> None:
        nonlocal n_samples
        phi_acc[:] += (n_kw + beta) / (n_k + v_beta)[:, np.newaxis]
        theta_acc[:] += (n_dk + alpha) / (doc_len + alpha * k_topics)[:, np.newaxis]
        n_samples += 1

    for sweep in range(1, params.n_iterations + 1):
        coin = rng.random(n_tokens)
        _gibbs_sweep(z, doc_of, word_of, n_dk, n_kw, n_k, alpha, beta, v_beta, coin)
        if validate_every and sweep % validate_every == 0:
            _check_counts(z, doc_of, word_of, n_dk, n_kw, n_k, doc_len)
        if sweep > params.burn_in and (sweep - params.burn_in) % _SAMPLE_EVERY == 0:
            take_sample()
    if n_samples == 0:
        take_sample()

    return LdaModel(phi=phi_acc / n_samples, theta=theta_acc / n_samples, terms=list(dtm.terms))


def _check_counts(z, doc_of, word_of, n_dk, n_kw, n_k, doc_len) -> None:
    ref_dk = np.zeros_like(n_dk)
    ref_kw = np.zeros_like(n_kw)
    np.add.at(ref_dk, (doc_of, z), 1)
    np.add.at(ref_kw, (z, word_of), 1)
    if not np.array_equal(ref_dk, n_dk) or not np.array_equal(ref_kw, n_kw):
        raise AssertionError("Gibbs bookkeeping diverged from token assignments")
    if not np.array_equal(n_dk.sum(axis=1).astype(np.float64), doc_len):
        raise AssertionError("per-document topic counts do not sum to document length")
    if not np.array_equal(n_kw.sum(axis=1), n_k):
        raise AssertionError("per-topic word counts do not sum to topic totals")


def lda_top_words(model: LdaModel, k: int, n: int) -> list[str]:
    """Top-n terms of topic k by phi, ties lexicographic."""
    row = model.phi[k]
    ranked = sorted(range(row.shape[0]), key=lambda t: (-row[t], model.terms[t]))
    return [model.terms[t] for t in ranked[:n]]


def tfidf_weight(dtm: DocTermMatrix) -> np.ndarray:
    """count * ln(n_docs / doc_freq) per entry; zero-df columns stay zero."""
    counts = dtm.counts.toarray().astype(np.float64)
    df = (counts > 0).sum(axis=0)
    idf = np.where(df > 0, np.log(dtm.n_docs / np.where(df > 0, df, 1.0)), 0.0)
    return counts * idf[np.newaxis, :]


def nmf_fit(X: np.ndarray, params: NmfParams, terms: list[str] | None = None) -> NmfModel:
    """Frobenius multiplicative updates from seeded uniform (0, 1] factors.

    Stops after n_iterations or once the relative objective change drops
    below tol; the half-squared-error objective is recorded per
    iteration (including the initial value).
    """
    X = np.asarray(X, dtype=np.float64)
    if np.any(X < 0):
        raise NegativeInput("factorization input must be non-negative")
    n_rows, n_cols = X.shape
    rng = np.random.default_rng(params.seed)
    W = 1.0 - rng.random((n_rows, params.K))
    H = 1.0 - rng.random((params.K, n_cols))

    def objective() -> float:
        diff = X - W @ H
        return 0.5 * float(np.sum(diff * diff))

    trace = [objective()]
    for _ in range(params.n_iterations):
        H *= (W.T @ X) / (W.T @ W @ H + _MU_EPS)
        W *= (X @ H.T) / (W @ (H @ H.T) + _MU_EPS)
        trace.append(objective())
        prev, cur = trace[-2], trace[-1]
        if abs(prev - cur) < params.tol * max(prev, _MU_EPS):
            break
    return NmfModel(W=W, H=H, objective_trace=np.array(trace), terms=list(terms or []))


def nmf_top_words(model: NmfModel, k: int, n: int) -> list[str]:
    """Top-n terms of component k by H, ties lexicographic."""
    row = model.H[k]
    ranked = sorted(range(row.shape[0]), key=lambda t: (-row[t], model.terms[t]))
    return [model.terms[t] for t in ranked[:n]]
