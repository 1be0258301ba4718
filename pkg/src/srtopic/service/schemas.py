"""Pydantic request/response models for the HTTP API.

File paths in requests refer to the filesystem of the host running the
service; artifacts are written there and the responses return the paths.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class VectorizeOptions(BaseModel):
    min_df: int = Field(default=3, ge=1)
    max_df: float = Field(default=0.85, gt=0.0, le=1.0)
    stopword_path: Optional[str] = None
    max_vocab: Optional[int] = Field(default=None, ge=1)


class UmapOptions(BaseModel):
    n_neighbors: int = Field(default=15, ge=2)
    n_components: int = Field(default=5, ge=1)
    min_dist: float = Field(default=0.0, ge=0.0)
    n_epochs: int = Field(default=200, ge=0)
    negative_sample_rate: int = Field(default=5, ge=0)
    learning_rate: float = Field(default=1.0, gt=0.0)


class HdbscanOptions(BaseModel):
    min_topic_size: int = Field(default=10, ge=2)
    min_samples: Optional[int] = Field(default=None, ge=1)


class LdaOptions(BaseModel):
    alpha: Optional[float] = Field(default=None, gt=0.0)  # None -> 50/K
    beta: float = Field(default=0.01, gt=0.0)
    n_iterations: int = Field(default=1000, ge=1)
    burn_in: int = Field(default=800, ge=0)


class NmfOptions(BaseModel):
    n_iterations: int = Field(default=500, ge=1)
    tol: float = Field(default=1e-6, ge=0.0)


class PreprocessRequest(BaseModel):
    corpus_path: str
    output_path: str
    level: Literal["partial", "full"] = "partial"
    lemma_table_path: Optional[str] = None


class PreprocessResponse(BaseModel):
    output_path: str
    n_docs: int
    n_empty: int


class FitRequest(BaseModel):
    corpus_path: str
    embeddings_path: str
    output_dir: str
    level: Literal["partial", "full"] = "partial"
    seed: int = 42
    n_keywords: int = Field(default=10, ge=1)
    nr_topics: Optional[int] = Field(default=None, ge=1)
    reduce_outliers: bool = True
    exclude_empty: bool = True
    vectorize: VectorizeOptions = VectorizeOptions()
    umap: UmapOptions = UmapOptions()
    hdbscan: HdbscanOptions = HdbscanOptions()


class FitResponse(BaseModel):
    report_path: str
    labels_path: str
    snapshot_path: str
    n_docs: int
    n_excluded: int
    n_topics: int
    n_outliers: int
    topic_sizes: list[int]


class FitLdaRequest(BaseModel):
    corpus_path: str
    output_dir: str
    level: Literal["partial", "full"] = "partial"
    seed: int = 42
    k: int = Field(default=15, ge=1)
    n_keywords: int = Field(default=10, ge=1)
    exclude_empty: bool = True
    vectorize: VectorizeOptions = VectorizeOptions()
    lda: LdaOptions = LdaOptions()


class FitNmfRequest(BaseModel):
    corpus_path: str
    output_dir: str
    level: Literal["partial", "full"] = "partial"
    seed: int = 42
    k: int = Field(default=15, ge=1)
    n_keywords: int = Field(default=10, ge=1)
    exclude_empty: bool = True
    vectorize: VectorizeOptions = VectorizeOptions()
    nmf: NmfOptions = NmfOptions()


class BaselineFitResponse(BaseModel):
    report_path: str
    labels_path: str
    snapshot_path: str
    n_docs: int
    n_excluded: int
    n_topics: int
    topic_sizes: list[int]


class EvalRequest(BaseModel):
    report_path: str
    corpus_path: str
    level: Literal["partial", "full"] = "partial"
    top_n: int = Field(default=10, ge=2)
    epsilon: float = Field(default=1e-12, gt=0.0)
    vectorize: VectorizeOptions = VectorizeOptions()


class EvalResponse(BaseModel):
    tc: float
    td: float
    n_topics: int
    per_topic_tc: list[Optional[float]]
    skipped_topics: list[int]


class SweepRequest(BaseModel):
    corpus_path: str
    output_path: str
    embeddings_path: Optional[str] = None
    level: Literal["partial", "full"] = "partial"
    models: list[Literal["bertopic", "lda", "nmf"]] = ["bertopic", "lda", "nmf"]
    topic_counts: list[int] = [10, 20, 30, 40, 50]
    seeds: list[int] = [42, 43, 44]
    top_n: int = Field(default=10, ge=2)
    epsilon: float = Field(default=1e-12, gt=0.0)
    n_keywords: int = Field(default=10, ge=1)
    exclude_empty: bool = True
    vectorize: VectorizeOptions = VectorizeOptions()
    umap: UmapOptions = UmapOptions()
    hdbscan: HdbscanOptions = HdbscanOptions()
    lda: LdaOptions = LdaOptions()
    nmf: NmfOptions = NmfOptions()


class SweepCell(BaseModel):
    model: str
    preprocessing: str
    n_topics: int
    run_seed: str
    tc: float
    td: float


class SweepResponse(BaseModel):
    report_path: str
    embeddings_sha256: Optional[str]
    corpus_sha256: str
    n_cells: int
    aggregates: list[SweepCell]


class ErrorBody(BaseModel):
    kind: str
    message: str
    exit_code: int
