"""Vocabulary construction, document-term counts and class-based TF-IDF.

The class-based weighting scores a term t in class c as

    W[c, t] = tf[c, t] * ln(1 + A / f[t])

where tf[c, t] is the count of t aggregated over the documents of class
c, f[t] the total count of t over all classes, and A the average total
count per class. Natural log throughout.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import DegenerateInput, EmptyVocabulary
from .preprocess import CleanCorpus


@dataclass
class VectorizeConfig:
    min_df: int = 3
    max_df: float = 0.85
    stopword_path: str | None = None
    max_vocab: int | None = None

    def __post_init__(self) -> None:
        if self.min_df < 1:
            raise ValueError("min_df must be at least 1")
        if not 0.0 < self.max_df <= 1.0:
            raise ValueError("max_df must be in (0, 1]")
        if self.max_vocab is not None and self.max_vocab < 1:
            raise ValueError("max_vocab must be at least 1 when given")


@dataclass
class Vocabulary:
    terms: list[str]
    index: dict[str, int]
    doc_freq: np.ndarray

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index


@dataclass
class DocTermMatrix:
    counts: sparse.csr_matrix
    terms: list[str]
    doc_ids: list[str]

    @property
    def n_docs(self) -> int:
        return self.counts.shape[0]

    @property
    def n_terms(self) -> int:
        return self.counts.shape[1]

    def triples(self) -> list[tuple[int, int, int]]:
        coo = self.counts.tocoo()
        return sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))


@dataclass
class CtfidfMatrix:
    weights: np.ndarray       # (n_classes, n_terms)
    class_tf: np.ndarray      # raw class-term counts the weights came from
    term_totals: np.ndarray   # f[t], per-term count summed over classes
    avg_per_class: float      # A, total count / n_classes

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def n_terms(self) -> int:
        return self.weights.shape[1]


def load_stopwords(path: str | Path) -> set[str]:
    """One word per line; blank lines and '#'-prefixed comment lines are ignored."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(word)
    return words


def build_vocabulary(
    corpus: CleanCorpus,
    cfg: VectorizeConfig,
    stopwords: set[str] | None = None,
) -> Vocabulary:
    """Filter terms by stopword list and document-frequency bounds.

    A term survives when min_df <= doc_freq <= max_df * n_docs. With
    max_vocab set, only the terms with the highest total corpus
    frequency are kept (ties broken lexicographically). The final term
    order is lexicographic.
    """
    if len(corpus) == 0:
        raise EmptyVocabulary("empty corpus")
    if stopwords is None:
        stopwords = load_stopwords(cfg.stopword_path) if cfg.stopword_path else set()

    df: Counter[str] = Counter()
    tf: Counter[str] = Counter()
    for doc in corpus.docs:
        kept = [t for t in doc.tokens if t not in stopwords]
        tf.update(kept)
        df.update(set(kept))

    n_docs = len(corpus)
    limit = cfg.max_df * n_docs
    candidates = [t for t, d in df.items() if cfg.min_df <= d <= limit]
    if cfg.max_vocab is not None and len(candidates) > cfg.max_vocab:
        candidates.sort(key=lambda t: (-tf[t], t))
        candidates = candidates[: cfg.max_vocab]
    candidates.sort()
    if not candidates:
        raise EmptyVocabulary(
            f"no term passed the filters (min_df={cfg.min_df}, max_df={cfg.max_df})"
        )

    return Vocabulary(
        terms=candidates,
        index={t: i for i, t in enumerate(candidates)},
        doc_freq=np.array([df[t] for t in candidates], dtype=np.int64),
    )


def count_matrix(corpus: CleanCorpus, vocab: Vocabulary) -> DocTermMatrix:
    """Sparse doc-term counts; tokens outside the vocabulary are ignored."""
    indptr = [0]
    indices: list[int] = []
    data: list[int] = []
    for doc in corpus.docs:
        row = Counter(vocab.index[t] for t in doc.tokens if t in vocab.index)
        for term_idx in sorted(row):
            indices.append(term_idx)
            data.append(row[term_idx])
        indptr.append(len(indices))
    counts = sparse.csr_matrix(
        (np.array(data, dtype=np.int64), np.array(indices, dtype=np.int64), np.array(indptr)),
        shape=(len(corpus), len(vocab)),
    )
    return DocTermMatrix(counts=counts, terms=list(vocab.terms), doc_ids=corpus.doc_ids)


def class_counts(dtm: DocTermMatrix, labels: np.ndarray) -> np.ndarray:
    """Sum doc-term counts per class label; label -1 rows (outliers) are excluded."""
    labels = np.asarray(labels)
    if labels.shape[0] != dtm.n_docs:
        raise ValueError("labels length must equal the number of documents")
    n_classes = int(labels.max()) + 1 if labels.size and labels.max() >= 0 else 0
    out = np.zeros((n_classes, dtm.n_terms), dtype=np.int64)
    for c in range(n_classes):
        rows = np.where(labels == c)[0]
        if rows.size:
            out[c] = np.asarray(dtm.counts[rows].sum(axis=0)).ravel()
    return out


def ctfidf(class_tf: np.ndarray) -> CtfidfMatrix:
    """Class-based TF-IDF weights from a class-term count matrix."""
    class_tf = np.asarray(class_tf, dtype=np.float64)
    if class_tf.ndim != 2 or class_tf.shape[0] < 1:
        raise DegenerateInput("need at least one class")
    row_totals = class_tf.sum(axis=1)
    if np.any(row_totals == 0):
        bad = int(np.where(row_totals == 0)[0][0])
        raise DegenerateInput(f"class {bad} has zero total count")

    f = class_tf.sum(axis=0)
    a = class_tf.sum() / class_tf.shape[0]
    safe_f = np.where(f > 0, f, 1.0)
    idf = np.where(f > 0, np.log(1.0 + a / safe_f), 0.0)
    weights = class_tf * idf[np.newaxis, :]
    return CtfidfMatrix(weights=weights, class_tf=class_tf, term_totals=f, avg_per_class=float(a))
