import os

# keep BLAS pools single-threaded so timing-sensitive tests measure one core
for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import numpy as np
import pytest

from srtopic.embedding_io import EmbeddingMatrix
from srtopic.preprocess import CleanCorpus, CleanDocument


# alphabet pools for fuzzing mixed-script tweets
FUZZ_CYRILLIC = "абвгдђежзијклљмнњопрстћуфхцчџшАБВГДЂЕЖЗИЈКЛЉМНЊОПРСТЋУФХЦЧЏШ"
FUZZ_LATIN = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZčćžšđČĆŽŠĐ"
FUZZ_OTHER = "0123456789 .,!?#@:/()-_\"'💉😀🚀🇷🇸ыэюя汉字    "


def fuzz_strings(n: int, seed: int = 42) -> list[str]:
    rng = np.random.default_rng(seed)
    pool = FUZZ_CYRILLIC + FUZZ_LATIN + FUZZ_OTHER
    out = []
    for _ in range(n):
        length = int(rng.integers(0, 60))
        out.append("".join(pool[i] for i in rng.integers(0, len(pool), length)))
    return out


def group_word(group: int, index: int) -> str:
    """Letter-only token: group letter + base-26 suffix, e.g. 'aab'."""
    return chr(97 + group) + chr(97 + index // 26) + chr(97 + index % 26)


def make_planted_corpus(
    n_groups: int = 5,
    docs_per_group: int = 200,
    vocab_per_group: int = 50,
    tokens_per_doc: int = 20,
    dim: int = 64,
    noise: float = 0.05,
    seed: int = 42,
):
    """Synthetic corpus with disjoint per-group vocabularies and embeddings
    drawn around well-separated unit centroids.

    Returns (corpus, embeddings, true_group_labels, group_vocabularies).
    """
    rng = np.random.default_rng(seed)
    groups = [[group_word(g, i) for i in range(vocab_per_group)] for g in range(n_groups)]
    docs, true_labels = [], []
    for g in range(n_groups):
        for d in range(docs_per_group):
            tokens = [str(w) for w in rng.choice(groups[g], tokens_per_doc)]
            docs.append(CleanDocument(id=f"d{g * docs_per_group + d}", tokens=tokens))
            true_labels.append(g)
    corpus = CleanCorpus(docs=docs)

    centroids = rng.normal(size=(n_groups, dim))
    centroids /= np.linalg.norm(centroids, axis=1, keepdims=True)
    dists = [
        np.linalg.norm(centroids[i] - centroids[j])
        for i in range(n_groups)
        for j in range(i + 1, n_groups)
    ]
    assert min(dists) >= 1.0, "centroid draw too close; pick another seed"

    rows = np.vstack(
        [centroids[g] + rng.normal(0, noise, dim) for g in true_labels]
    ).astype(np.float32)
    emb = EmbeddingMatrix(doc_ids=[d.id for d in docs], rows=rows)
    return corpus, emb, np.array(true_labels), groups


def make_blobs_lowrank(
    n_blobs: int = 3,
    per_blob: int = 20,
    ambient_dim: int = 64,
    latent_dim: int = 2,
    noise: float = 0.05,
    seed: int = 7,
):
    """Gaussian blobs whose covariance is supported on a random
    latent_dim-dimensional subspace of the ambient space; centers sit in
    the same subspace with pairwise distance >= 1.

    Returns (points, blob_labels).
    """
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.normal(size=(ambient_dim, latent_dim)))
    centers = np.zeros((n_blobs, latent_dim))
    for g in range(n_blobs):
        centers[g, g % latent_dim] = 2.0 * (1 + g // latent_dim)
    latent = np.vstack(
        [centers[g] + rng.normal(0, noise, (per_blob, latent_dim)) for g in range(n_blobs)]
    )
    points = latent @ basis.T
    labels = np.repeat(np.arange(n_blobs), per_blob)
    dists = [
        np.linalg.norm(centers[i] - centers[j])
        for i in range(n_blobs)
        for j in range(i + 1, n_blobs)
    ]
    assert min(dists) >= 1.0
    return points, labels


def purity(found: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of docs whose cluster's majority group matches their own."""
    total = 0
    for c in np.unique(found[found >= 0]):
        members = truth[found == c]
        total += np.bincount(members).max()
    return total / len(truth)


def knn_sets(dist: np.ndarray, k: int) -> list[set[int]]:
    dist = dist.copy()
    np.fill_diagonal(dist, np.inf)
    return [set(np.argsort(dist[i], kind="stable")[:k]) for i in range(dist.shape[0])]


def euclidean_matrix(x: np.ndarray) -> np.ndarray:
    sq = np.sum(x**2, axis=1)
    d2 = sq[:, np.newaxis] + sq[np.newaxis, :] - 2.0 * x @ x.T
    return np.sqrt(np.maximum(d2, 0.0))


@pytest.fixture(scope="session")
def planted5():
    return make_planted_corpus()


@pytest.fixture(scope="session")
def planted_small():
    return make_planted_corpus(n_groups=5, docs_per_group=40, vocab_per_group=30, tokens_per_doc=15)


@pytest.fixture(scope="session")
def planted20():
    return make_planted_corpus(n_groups=20, docs_per_group=50, vocab_per_group=30, tokens_per_doc=15)


@pytest.fixture()
def client():
    from fastapi.testclient import TestClient

    from srtopic.service import create_app

    return TestClient(create_app())
