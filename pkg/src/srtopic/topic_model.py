"""Topic assembly: clusters -> keyword topics, outlier reassignment and
topic-count control.

fit() runs normalize -> reduce -> cluster -> class counts -> class-based
TF-IDF -> keyword ranking. Outliers keep label -1 until
reduce_outliers() reassigns them by cosine similarity of their weighted
term vector against each topic; only documents with no in-vocabulary
tokens stay outliers. reduce_num_topics() repeatedly merges the
smallest topic into its most similar peer until a target count is hit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import reduce as reduce_mod
from .cluster import HdbscanParams, cluster
from .embedding_io import EmbeddingMatrix, l2_normalize
from .errors import MismatchedIds, NoTopics
from .preprocess import CleanCorpus
from .reduce import UmapParams
from .vectorize import (
    CtfidfMatrix,
    DocTermMatrix,
    VectorizeConfig,
    Vocabulary,
    build_vocabulary,
    class_counts,
    count_matrix,
    ctfidf,
)


@dataclass
class Topic:
    id: int
    keywords: list[tuple[str, float]]
    size: int


@dataclass
class FitConfig:
    vectorize: VectorizeConfig = field(default_factory=VectorizeConfig)
    umap: UmapParams = field(default_factory=UmapParams)
    hdbscan: HdbscanParams = field(default_factory=HdbscanParams)
    n_keywords: int = 10


@dataclass
class TopicModelResult:
    labels: np.ndarray
    topics: list[Topic]
    ctfidf: CtfidfMatrix | None
    vocab: Vocabulary
    params_snapshot: dict

    @property
    def n_topics(self) -> int:
        return len(self.topics)

    @property
    def n_outliers(self) -> int:
        return int(np.sum(self.labels == -1))


def top_keywords(ctf: CtfidfMatrix, class_id: int, n: int, terms: list[str]) -> list[tuple[str, float]]:
    """The n heaviest terms of one class row; ties break lexicographically."""
    row = ctf.weights[class_id]
    nonzero = np.nonzero(row)[0]
    ranked = sorted(nonzero, key=lambda t: (-row[t], terms[t]))
    return [(terms[t], float(row[t])) for t in ranked[:n]]


def _topics_from(ctf: CtfidfMatrix, labels: np.ndarray, terms: list[str], n_keywords: int) -> list[Topic]:
    return [
        Topic(
            id=c,
            keywords=top_keywords(ctf, c, n_keywords, terms),
            size=int(np.sum(labels == c)),
        )
        for c in range(ctf.n_classes)
    ]


def align_embeddings(corpus: CleanCorpus, emb: EmbeddingMatrix) -> EmbeddingMatrix:
    """Reorder embedding rows to corpus document order, matching by id."""
    pos = {doc_id: i for i, doc_id in enumerate(emb.doc_ids)}
    missing = [d for d in corpus.doc_ids if d not in pos]
    if missing or len(emb.doc_ids) != len(corpus):
        raise MismatchedIds(
            f"corpus has {len(corpus)} docs, embeddings {len(emb.doc_ids)}; "
            f"first missing id: {missing[0] if missing else 'none'}"
        )
    order = [pos[d] for d in corpus.doc_ids]
    return EmbeddingMatrix(doc_ids=list(corpus.doc_ids), rows=emb.rows[order])


def fit(corpus: CleanCorpus, emb: EmbeddingMatrix, cfg: FitConfig) -> TopicModelResult:
    """Cluster documents in embedding space and describe each cluster by
    its top c-TF-IDF keywords. Outliers stay at label -1."""
    emb = align_embeddings(corpus, emb)
    snapshot = {
        "vectorize": vars(cfg.vectorize).copy(),
        "umap": vars(cfg.umap).copy(),
        "hdbscan": vars(cfg.hdbscan).copy(),
        "n_keywords": cfg.n_keywords,
    }

    vocab = build_vocabulary(corpus, cfg.vectorize)
    dtm = count_matrix(corpus, vocab)

    normalized = l2_normalize(emb)
    reduced = reduce_mod.reduce(normalized, cfg.umap)
    labels = cluster(reduced, cfg.hdbscan)

    if labels.n_clusters == 0:
        return TopicModelResult(
            labels=labels.labels, topics=[], ctfidf=None, vocab=vocab, params_snapshot=snapshot
        )
    ctf = ctfidf(class_counts(dtm, labels.labels))
    topics = _topics_from(ctf, labels.labels, vocab.terms, cfg.n_keywords)
    return TopicModelResult(
        labels=labels.labels, topics=topics, ctfidf=ctf, vocab=vocab, params_snapshot=snapshot
    )


def reduce_outliers(result: TopicModelResult, dtm: DocTermMatrix, n_keywords: int = 10) -> TopicModelResult:
    """Assign each outlier to the topic whose c-TF-IDF vector is most
    cosine-similar to the outlier's IDF-weighted term counts.

    Documents with no in-vocabulary tokens cannot be placed and keep
    label -1. Topic weights and keywords are recomputed afterward.
    """
    if not result.topics or result.ctfidf is None:
        raise NoTopics("outlier reduction needs at least one topic")

    labels = result.labels.copy()
    out_rows = np.where(labels == -1)[0]
    if out_rows.size:
        ctf = result.ctfidf
        f = ctf.term_totals
        idf = np.where(f > 0, np.log(1.0 + ctf.avg_per_class / np.where(f > 0, f, 1.0)), 0.0)
        x = dtm.counts[out_rows].toarray().astype(np.float64) * idf[np.newaxis, :]
        topic_norms = np.linalg.norm(ctf.weights, axis=1)
        doc_norms = np.linalg.norm(x, axis=1)
        sims = x @ ctf.weights.T
        denom = doc_norms[:, np.newaxis] * topic_norms[np.newaxis, :]
        sims = np.where(denom > 0, sims / np.where(denom > 0, denom, 1.0), 0.0)

        has_tokens = np.asarray(dtm.counts[out_rows].sum(axis=1)).ravel() > 0
        assigned = np.argmax(sims, axis=1)  # ties resolve to the lower topic id
        labels[out_rows[has_tokens]] = assigned[has_tokens]

    ctf = ctfidf(class_counts(dtm, labels))
    topics = _topics_from(ctf, labels, dtm.terms, n_keywords)
    return TopicModelResult(
        labels=labels,
        topics=topics,
        ctfidf=ctf,
        vocab=result.vocab,
        params_snapshot=result.params_snapshot,
    )


def reduce_num_topics(result: TopicModelResult, target: int, n_keywords: int = 10) -> TopicModelResult:
    """Merge the smallest topic into its most c-TF-IDF-similar peer until
    at most `target` topics remain, then re-densify ids by size.

    Tie rules: smallest-topic ties pick the higher id; similarity ties
    pick the lower id. A target at or above the current count is a
    no-op.
    """
    if target < 1:
        raise ValueError("target must be at least 1")
    if result.n_topics <= target or result.ctfidf is None:
        return result

    labels = result.labels.copy()
    class_tf = result.ctfidf.class_tf.copy()
    active = sorted(t.id for t in result.topics)
    sizes = {t.id: t.size for t in result.topics}

    def weights_for(ids: list[int]) -> np.ndarray:
        return ctfidf(class_tf[ids]).weights

    while len(active) > target:
        smallest = min(active, key=lambda c: (sizes[c], -c))
        w = weights_for(active)
        norms = np.linalg.norm(w, axis=1)
        s_pos = active.index(smallest)
        sims = w @ w[s_pos] / np.where(norms * norms[s_pos] > 0, norms * norms[s_pos], 1.0)
        sims[s_pos] = -np.inf
        target_pos = int(np.argmax(sims))  # ties resolve to the lower id
        into = active[target_pos]

        labels[labels == smallest] = into
        class_tf[into] += class_tf[smallest]
        sizes[into] += sizes[smallest]
        del sizes[smallest]
        active.remove(smallest)

    # densify ids by descending size, ties by lower previous id
    order = sorted(active, key=lambda c: (-sizes[c], c))
    remap = {old: new for new, old in enumerate(order)}
    new_labels = labels.copy()
    for old, new in remap.items():
        new_labels[labels == old] = new
    ctf = ctfidf(class_tf[order])
    topics = _topics_from(ctf, new_labels, result.vocab.terms, n_keywords)
    return TopicModelResult(
        labels=new_labels,
        topics=topics,
        ctfidf=ctf,
        vocab=result.vocab,
        params_snapshot=result.params_snapshot,
    )
