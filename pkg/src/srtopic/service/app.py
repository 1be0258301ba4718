"""FastAPI application wrapping the pipeline.

Every endpoint reads its inputs from disk, runs the corresponding
pipeline stage(s), writes artifacts and returns their paths plus
summary numbers. Errors map to the CLI exit-code convention via the
JSON error body: config 2, data 3, model 4.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..baselines import (
    LdaParams,
    NmfParams,
    lda_fit,
    lda_top_words,
    nmf_fit,
    nmf_top_words,
    tfidf_weight,
)
from ..embedding_io import read_embeddings
from ..errors import ConfigError, SrtopicError
from ..evaluation import (
    EvalConfig,
    LdaSweepOptions,
    NmfSweepOptions,
    cooccurrence_stats,
    sweep,
    topic_coherence,
    topic_diversity,
)
from ..preprocess import (
    CleanCorpus,
    PreprocessConfig,
    preprocess_corpus,
    read_clean_corpus,
    read_raw_corpus,
    write_clean_corpus,
)
from ..reports import (
    file_sha256,
    read_topic_report,
    write_labels,
    write_snapshot,
    write_sweep_report,
    write_topic_report,
)
from ..seeding import derive_seed
from ..topic_model import (
    FitConfig,
    Topic,
    fit,
    reduce_num_topics,
    reduce_outliers,
)
from ..vectorize import (
    VectorizeConfig,
    build_vocabulary,
    count_matrix,
)
from ..cluster import HdbscanParams
from ..reduce import UmapParams
from . import schemas


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{what} not found: {path}")
    return p


def _vectorize_config(opts: schemas.VectorizeOptions) -> VectorizeConfig:
    if opts.stopword_path is not None:
        _require_file(opts.stopword_path, "stopword file")
    return VectorizeConfig(
        min_df=opts.min_df,
        max_df=opts.max_df,
        stopword_path=opts.stopword_path,
        max_vocab=opts.max_vocab,
    )


def _fit_config(req) -> FitConfig:
    return FitConfig(
        vectorize=_vectorize_config(req.vectorize),
        umap=UmapParams(
            n_neighbors=req.umap.n_neighbors,
            n_components=req.umap.n_components,
            min_dist=req.umap.min_dist,
            n_epochs=req.umap.n_epochs,
            negative_sample_rate=req.umap.negative_sample_rate,
            learning_rate=req.umap.learning_rate,
            seed=derive_seed(req.seed, "reduce"),
        ),
        hdbscan=HdbscanParams(
            min_cluster_size=req.hdbscan.min_topic_size,
            min_samples=req.hdbscan.min_samples,
        ),
        n_keywords=req.n_keywords,
    )


def _split_empty(corpus: CleanCorpus, exclude_empty: bool) -> tuple[CleanCorpus, list[str]]:
    if not exclude_empty:
        return corpus, []
    kept = [d for d in corpus.docs if not d.empty]
    excluded = [d.id for d in corpus.docs if d.empty]
    return CleanCorpus(docs=kept, level=corpus.level), excluded


def _full_label_rows(corpus: CleanCorpus, fitted_ids: list[str], labels) -> list[int]:
    by_id = {doc_id: int(lab) for doc_id, lab in zip(fitted_ids, labels)}
    return [by_id.get(doc_id, -1) for doc_id in corpus.doc_ids]


def create_app() -> FastAPI:
    app = FastAPI(title="srtopic", version=__version__)

    @app.exception_handler(SrtopicError)
    async def _srtopic_error(_: Request, exc: SrtopicError) -> JSONResponse:
        kind = {2: "config", 3: "data", 4: "model"}.get(exc.exit_code, "error")
        status = {2: 422, 3: 400, 4: 500}.get(exc.exit_code, 500)
        body = schemas.ErrorBody(kind=kind, message=str(exc), exit_code=exc.exit_code)
        return JSONResponse(status_code=status, content={"detail": body.model_dump()})

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, exc: ValueError) -> JSONResponse:
        body = schemas.ErrorBody(kind="config", message=str(exc), exit_code=2)
        return JSONResponse(status_code=422, content={"detail": body.model_dump()})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/preprocess", response_model=schemas.PreprocessResponse)
    def preprocess(req: schemas.PreprocessRequest) -> schemas.PreprocessResponse:
        _require_file(req.corpus_path, "corpus file")
        if req.level == "full" and req.lemma_table_path is not None:
            _require_file(req.lemma_table_path, "lemma table")
        docs = read_raw_corpus(req.corpus_path)
        corpus = preprocess_corpus(
            docs, PreprocessConfig(level=req.level, lemma_table_path=req.lemma_table_path)
        )
        Path(req.output_path).parent.mkdir(parents=True, exist_ok=True)
        write_clean_corpus(corpus, req.output_path)
        return schemas.PreprocessResponse(
            output_path=req.output_path,
            n_docs=len(corpus),
            n_empty=len(corpus.empty_doc_ids),
        )

    @app.post("/fit", response_model=schemas.FitResponse)
    def fit_endpoint(req: schemas.FitRequest) -> schemas.FitResponse:
        _require_file(req.corpus_path, "corpus file")
        _require_file(req.embeddings_path, "embeddings file")
        corpus = read_clean_corpus(req.corpus_path, level=req.level)
        fitted, excluded = _split_empty(corpus, req.exclude_empty)
        emb = read_embeddings(req.embeddings_path)
        if req.exclude_empty and excluded:
            dropped = set(excluded)
            keep = [i for i, doc_id in enumerate(emb.doc_ids) if doc_id not in dropped]
            emb = type(emb)(doc_ids=[emb.doc_ids[i] for i in keep], rows=emb.rows[keep])

        cfg = _fit_config(req)
        result = fit(fitted, emb, cfg)
        if req.nr_topics is not None and result.n_topics > req.nr_topics:
            result = reduce_num_topics(result, req.nr_topics, cfg.n_keywords)
        if req.reduce_outliers and result.n_topics > 0:
            vocab = result.vocab
            dtm = count_matrix(fitted, vocab)
            result = reduce_outliers(result, dtm, cfg.n_keywords)

        out = Path(req.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        report_path = out / "topics.tsv"
        labels_path = out / "labels.tsv"
        snapshot_path = out / "params_snapshot.json"
        write_topic_report(result.topics, report_path)
        write_labels(
            corpus.doc_ids, _full_label_rows(corpus, fitted.doc_ids, result.labels), labels_path
        )
        snapshot = req.model_dump(mode="json")
        snapshot["command"] = "fit"
        snapshot["corpus_sha256"] = file_sha256(req.corpus_path)
        snapshot["embeddings_sha256"] = file_sha256(req.embeddings_path)
        write_snapshot(snapshot, snapshot_path)
        return schemas.FitResponse(
            report_path=str(report_path),
            labels_path=str(labels_path),
            snapshot_path=str(snapshot_path),
            n_docs=len(corpus),
            n_excluded=len(excluded),
            n_topics=result.n_topics,
            n_outliers=result.n_outliers,
            topic_sizes=[t.size for t in result.topics],
        )

    def _write_baseline_artifacts(req, command, corpus, fitted, topics, labels):
        out = Path(req.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        report_path = out / "topics.tsv"
        labels_path = out / "labels.tsv"
        snapshot_path = out / "params_snapshot.json"
        write_topic_report(topics, report_path)
        write_labels(
            corpus.doc_ids, _full_label_rows(corpus, fitted.doc_ids, labels), labels_path
        )
        snapshot = req.model_dump(mode="json")
        snapshot["command"] = command
        snapshot["corpus_sha256"] = file_sha256(req.corpus_path)
        write_snapshot(snapshot, snapshot_path)
        return report_path, labels_path, snapshot_path

    @app.post("/fit/lda", response_model=schemas.BaselineFitResponse)
    def fit_lda(req: schemas.FitLdaRequest) -> schemas.BaselineFitResponse:
        _require_file(req.corpus_path, "corpus file")
        corpus = read_clean_corpus(req.corpus_path, level=req.level)
        fitted, excluded = _split_empty(corpus, req.exclude_empty)
        vocab = build_vocabulary(fitted, _vectorize_config(req.vectorize))
        dtm = count_matrix(fitted, vocab)
        params = LdaParams(
            K=req.k,
            alpha=req.lda.alpha,
            beta=req.lda.beta,
            n_iterations=req.lda.n_iterations,
            burn_in=req.lda.burn_in,
            seed=derive_seed(req.seed, "lda"),
        )
        model = lda_fit(dtm, params)
        labels = np.argmax(model.theta, axis=1)
        topics = []
        for k in range(req.k):
            words = lda_top_words(model, k, req.n_keywords)
            weights = sorted(
                ((w, float(model.phi[k, vocab.index[w]])) for w in words),
                key=lambda item: (-item[1], item[0]),
            )
            topics.append(Topic(id=k, keywords=weights, size=int(np.sum(labels == k))))
        report_path, labels_path, snapshot_path = _write_baseline_artifacts(
            req, "fit-lda", corpus, fitted, topics, labels
        )
        return schemas.BaselineFitResponse(
            report_path=str(report_path),
            labels_path=str(labels_path),
            snapshot_path=str(snapshot_path),
            n_docs=len(corpus),
            n_excluded=len(excluded),
            n_topics=len(topics),
            topic_sizes=[t.size for t in topics],
        )

    @app.post("/fit/nmf", response_model=schemas.BaselineFitResponse)
    def fit_nmf(req: schemas.FitNmfRequest) -> schemas.BaselineFitResponse:
        _require_file(req.corpus_path, "corpus file")
        corpus = read_clean_corpus(req.corpus_path, level=req.level)
        fitted, excluded = _split_empty(corpus, req.exclude_empty)
        vocab = build_vocabulary(fitted, _vectorize_config(req.vectorize))
        dtm = count_matrix(fitted, vocab)
        params = NmfParams(
            K=req.k,
            n_iterations=req.nmf.n_iterations,
            tol=req.nmf.tol,
            seed=derive_seed(req.seed, "nmf"),
        )
        model = nmf_fit(tfidf_weight(dtm), params, terms=dtm.terms)
        labels = np.argmax(model.W, axis=1)
        topics = []
        for k in range(req.k):
            words = nmf_top_words(model, k, req.n_keywords)
            weights = sorted(
                ((w, float(model.H[k, vocab.index[w]])) for w in words),
                key=lambda item: (-item[1], item[0]),
            )
            topics.append(Topic(id=k, keywords=weights, size=int(np.sum(labels == k))))
        report_path, labels_path, snapshot_path = _write_baseline_artifacts(
            req, "fit-nmf", corpus, fitted, topics, labels
        )
        return schemas.BaselineFitResponse(
            report_path=str(report_path),
            labels_path=str(labels_path),
            snapshot_path=str(snapshot_path),
            n_docs=len(corpus),
            n_excluded=len(excluded),
            n_topics=len(topics),
            topic_sizes=[t.size for t in topics],
        )

    @app.post("/eval", response_model=schemas.EvalResponse)
    def eval_endpoint(req: schemas.EvalRequest) -> schemas.EvalResponse:
        _require_file(req.report_path, "topic report")
        _require_file(req.corpus_path, "corpus file")
        topics = read_topic_report(req.report_path)
        corpus = read_clean_corpus(req.corpus_path, level=req.level)
        vocab = build_vocabulary(corpus, _vectorize_config(req.vectorize))
        stats = cooccurrence_stats(corpus, vocab)
        keywords = [[w for w, _ in t.keywords] for t in topics]
        per_topic, tc, skipped = topic_coherence(keywords, stats, req.top_n, req.epsilon)
        td = topic_diversity(keywords, req.top_n)
        return schemas.EvalResponse(
            tc=tc,
            td=td,
            n_topics=len(topics),
            per_topic_tc=[None if np.isnan(s) else s for s in per_topic],
            skipped_topics=skipped,
        )

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep_endpoint(req: schemas.SweepRequest) -> schemas.SweepResponse:
        _require_file(req.corpus_path, "corpus file")
        corpus = read_clean_corpus(req.corpus_path, level=req.level)
        fitted, _ = _split_empty(corpus, req.exclude_empty)
        emb = None
        emb_hash = None
        if "bertopic" in req.models:
            if req.embeddings_path is None:
                raise ConfigError("embeddings_path is required when the bertopic model is swept")
            _require_file(req.embeddings_path, "embeddings file")
            emb = read_embeddings(req.embeddings_path)
            emb_hash = file_sha256(req.embeddings_path)
            fitted_ids = set(fitted.doc_ids)
            keep = [i for i, doc_id in enumerate(emb.doc_ids) if doc_id in fitted_ids]
            emb = type(emb)(doc_ids=[emb.doc_ids[i] for i in keep], rows=emb.rows[keep])

        cfg = EvalConfig(
            top_n=req.top_n,
            epsilon=req.epsilon,
            runs=len(req.seeds),
            topic_counts=list(req.topic_counts),
            seeds=list(req.seeds),
        )
        fit_cfg = _fit_config(_FitDefaults(req))
        lda_opts = LdaSweepOptions(
            alpha=req.lda.alpha,
            beta=req.lda.beta,
            n_iterations=req.lda.n_iterations,
            burn_in=req.lda.burn_in,
        )
        nmf_opts = NmfSweepOptions(n_iterations=req.nmf.n_iterations, tol=req.nmf.tol)

        reports = [
            sweep(fitted, emb, model, cfg, fit_cfg, lda_opts, nmf_opts) for model in req.models
        ]
        Path(req.output_path).parent.mkdir(parents=True, exist_ok=True)
        write_sweep_report(reports, req.output_path)
        aggregates = [
            schemas.SweepCell(
                model=r.model,
                preprocessing=r.preprocessing,
                n_topics=r.n_topics,
                run_seed="mean",
                tc=r.tc,
                td=r.td,
            )
            for report in reports
            for r in report.aggregates
        ]
        return schemas.SweepResponse(
            report_path=req.output_path,
            embeddings_sha256=emb_hash,
            corpus_sha256=file_sha256(req.corpus_path),
            n_cells=sum(len(r.rows) for r in reports),
            aggregates=aggregates,
        )

    return app


class _FitDefaults:
    """Adapter giving SweepRequest the field shape _fit_config expects."""

    def __init__(self, req: schemas.SweepRequest):
        self.vectorize = req.vectorize
        self.umap = req.umap
        self.hdbscan = req.hdbscan
        self.n_keywords = req.n_keywords
        self.seed = 42  # unused: sweep derives per-run seeds itself
