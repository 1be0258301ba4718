"""Topic coherence (NPMI), topic diversity, and the sweep protocol.

Probabilities are document-level: a word counts once per document it
appears in, and a pair counts once per document containing both. The
reference corpus is the modeling corpus itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations
from math import log

import numpy as np

from .baselines import (
    LdaParams,
    NmfParams,
    lda_fit,
    lda_top_words,
    nmf_fit,
    nmf_top_words,
    tfidf_weight,
)
from .embedding_io import EmbeddingMatrix
from .errors import DataError
from .preprocess import CleanCorpus
from .seeding import derive_seed
from .topic_model import FitConfig, fit, reduce_num_topics, reduce_outliers
from .vectorize import Vocabulary, build_vocabulary, count_matrix

MODELS = ("bertopic", "lda", "nmf")


@dataclass
class EvalConfig:
    top_n: int = 10
    epsilon: float = 1e-12
    runs: int = 3
    topic_counts: list[int] = field(default_factory=lambda: [10, 20, 30, 40, 50])
    seeds: list[int] = field(default_factory=lambda: [42, 43, 44])

    def __post_init__(self) -> None:
        if self.top_n < 2:
            raise ValueError("top_n must be at least 2")
        if self.runs != len(self.seeds):
            raise ValueError("runs must equal the number of seeds")


@dataclass
class LdaSweepOptions:
    alpha: float | None = None  # None resolves to 50/K per cell
    beta: float = 0.01
    n_iterations: int = 1000
    burn_in: int = 800


@dataclass
class NmfSweepOptions:
    n_iterations: int = 500
    tol: float = 1e-6


@dataclass
class EvalRow:
    model: str
    preprocessing: str
    n_topics: int
    seed: int
    tc: float
    td: float


@dataclass
class EvalReport:
    rows: list[EvalRow]
    aggregates: list[EvalRow]  # one per (model, n_topics); seed field unused


class CooccurrenceStats:
    """Document frequencies and pairwise document co-occurrence counts."""

    def __init__(self, doc_sets: dict[str, set[int]], n_docs: int):
        self._doc_sets = doc_sets
        self.n_docs = n_docs

    def df(self, word: str) -> int:
        docs = self._doc_sets.get(word)
        return len(docs) if docs else 0

    def pair_df(self, a: str, b: str) -> int:
        da = self._doc_sets.get(a)
        db = self._doc_sets.get(b)
        if not da or not db:
            return 0
        if len(da) > len(db):
            da, db = db, da
        return sum(1 for d in da if d in db)

    def p(self, word: str) -> float:
        return self.df(word) / self.n_docs

    def p_pair(self, a: str, b: str) -> float:
        return self.pair_df(a, b) / self.n_docs


def cooccurrence_stats(corpus: CleanCorpus, vocab: Vocabulary) -> CooccurrenceStats:
    if len(corpus) == 0:
        raise DataError("cannot build co-occurrence statistics from an empty corpus")
    doc_sets: dict[str, set[int]] = {}
    for i, doc in enumerate(corpus.docs):
        for token in set(doc.tokens):
            if token in vocab.index:
                doc_sets.setdefault(token, set()).add(i)
    return CooccurrenceStats(doc_sets, len(corpus))


def npmi_pair(wi: str, wj: str, stats: CooccurrenceStats, eps: float = 1e-12) -> float:
    """Normalized PMI, clamped to [-1, 1] after smoothing the joint."""
    p_i, p_j = stats.p(wi), stats.p(wj)
    if p_i <= 0 or p_j <= 0:
        raise DataError(f"word {wi if p_i <= 0 else wj!r} does not occur in the corpus")
    joint = stats.p_pair(wi, wj) + eps
    if joint >= 1.0:
        return 1.0
    value = log(joint / (p_i * p_j)) / -log(joint)
    return min(1.0, max(-1.0, value))


def topic_coherence(
    topic_keywords: list[list[str]],
    stats: CooccurrenceStats,
    top_n: int = 10,
    eps: float = 1e-12,
) -> tuple[list[float], float, list[int]]:
    """Mean pairwise NPMI of each topic's top words.

    Returns (per-topic scores, unweighted mean, indices of skipped
    topics). A topic with fewer than two in-corpus keywords is skipped.
    """
    per_topic: list[float] = []
    skipped: list[int] = []
    for t, words in enumerate(topic_keywords):
        usable = [w for w in words[:top_n] if stats.df(w) > 0]
        if len(usable) < 2:
            skipped.append(t)
            per_topic.append(float("nan"))
            continue
        scores = [npmi_pair(a, b, stats, eps) for a, b in combinations(usable, 2)]
        per_topic.append(sum(scores) / len(scores))
    scored = [s for s in per_topic if not np.isnan(s)]
    mean = sum(scored) / len(scored) if scored else 0.0
    return per_topic, mean, skipped


def topic_diversity(topic_keywords: list[list[str]], top_n: int = 10) -> float:
    """Unique words among all topics' top-n lists over the slots they fill."""
    taken: list[str] = []
    for words in topic_keywords:
        taken.extend(words[:top_n])
    if not taken:
        return 1.0
    return len(set(taken)) / len(taken)


def _bertopic_cell_fit(corpus, emb, fit_cfg: FitConfig, seed: int):
    cfg = replace(fit_cfg, umap=replace(fit_cfg.umap, seed=derive_seed(seed, "reduce")))
    return fit(corpus, emb, cfg)


def sweep(
    corpus: CleanCorpus,
    emb: EmbeddingMatrix | None,
    model_spec: str,
    cfg: EvalConfig,
    fit_cfg: FitConfig,
    lda_opts: LdaSweepOptions | None = None,
    nmf_opts: NmfSweepOptions | None = None,
) -> EvalReport:
    """Fit the chosen model for every (topic_count, seed) cell and score it.

    The embedding path fits once per seed, then hits each topic count via
    topic merging followed by outlier reassignment; LDA/NMF take the
    count as K directly. TC and TD are averaged per topic count.
    """
    if model_spec not in MODELS:
        raise ValueError(f"unknown model {model_spec!r}")
    if model_spec == "bertopic" and emb is None:
        raise DataError("the embedding path needs an embedding matrix")

    vocab = build_vocabulary(corpus, fit_cfg.vectorize)
    dtm = count_matrix(corpus, vocab)
    stats = cooccurrence_stats(corpus, vocab)

    rows: list[EvalRow] = []
    fits_by_seed = {}
    for count in cfg.topic_counts:
        for seed in cfg.seeds:
            try:
                if model_spec == "bertopic":
                    if seed not in fits_by_seed:
                        fits_by_seed[seed] = _bertopic_cell_fit(corpus, emb, fit_cfg, seed)
                    result = reduce_num_topics(fits_by_seed[seed], count, fit_cfg.n_keywords)
                    result = reduce_outliers(result, dtm, fit_cfg.n_keywords)
                    keywords = [[w for w, _ in t.keywords] for t in result.topics]
                elif model_spec == "lda":
                    opts = lda_opts or LdaSweepOptions()
                    params = LdaParams(
                        K=count,
                        alpha=opts.alpha,
                        beta=opts.beta,
                        n_iterations=opts.n_iterations,
                        burn_in=opts.burn_in,
                        seed=derive_seed(seed, "lda"),
                    )
                    model = lda_fit(dtm, params)
                    keywords = [lda_top_words(model, k, cfg.top_n) for k in range(count)]
                else:
                    opts = nmf_opts or NmfSweepOptions()
                    params = NmfParams(
                        K=count,
                        n_iterations=opts.n_iterations,
                        tol=opts.tol,
                        seed=derive_seed(seed, "nmf"),
                    )
                    model = nmf_fit(tfidf_weight(dtm), params, terms=dtm.terms)
                    keywords = [nmf_top_words(model, k, cfg.top_n) for k in range(count)]
            except Exception as exc:
                raise type(exc)(
                    f"sweep cell (model={model_spec}, n_topics={count}, seed={seed}) failed: {exc}"
                ) from exc
            _, tc, _ = topic_coherence(keywords, stats, cfg.top_n, cfg.epsilon)
            td = topic_diversity(keywords, cfg.top_n)
            if not (-1.0 <= tc <= 1.0 and 0.0 <= td <= 1.0):
                raise AssertionError(f"metric out of bounds: tc={tc} td={td}")
            rows.append(
                EvalRow(
                    model=model_spec,
                    preprocessing=corpus.level,
                    n_topics=count,
                    seed=seed,
                    tc=tc,
                    td=td,
                )
            )

    aggregates = []
    for count in cfg.topic_counts:
        cell = [r for r in rows if r.n_topics == count]
        aggregates.append(
            EvalRow(
                model=model_spec,
                preprocessing=corpus.level,
                n_topics=count,
                seed=-1,
                tc=sum(r.tc for r in cell) / len(cell),
                td=sum(r.td for r in cell) / len(cell),
            )
        )
    return EvalReport(rows=rows, aggregates=aggregates)
