"""End-to-end acceptance suite.

Each test covers one release criterion at its stated tolerance and
prints a PASS line when it holds; a failing criterion fails the test.
All fixtures are synthetic (token corpora + EMB1 embedding files), no
encoder involved.
"""

import math
import re
import time

import numpy as np
import pytest
from click.testing import CliRunner

from conftest import (
    euclidean_matrix,
    fuzz_strings,
    knn_sets,
    make_blobs_lowrank,
    make_planted_corpus,
    purity,
)
from srtopic.baselines import LdaParams, NmfParams, lda_fit, lda_top_words, nmf_fit
from srtopic.cli import main as cli_main
from srtopic.embedding_io import EmbeddingMatrix, l2_normalize, write_embeddings
from srtopic.evaluation import (
    cooccurrence_stats,
    npmi_pair,
    topic_coherence,
    topic_diversity,
)
from srtopic.preprocess import (
    CleanCorpus,
    CleanDocument,
    PreprocessConfig,
    RawDocument,
    clean,
    preprocess_corpus,
    transliterate,
    write_clean_corpus,
)
from srtopic.reduce import UmapParams, reduce
from srtopic.reports import read_topic_report
from srtopic.topic_model import FitConfig, fit, reduce_num_topics, reduce_outliers
from srtopic.vectorize import (
    VectorizeConfig,
    build_vocabulary,
    count_matrix,
    ctfidf,
)


def run_cli(*args):
    return CliRunner().invoke(cli_main, [str(a) for a in args], catch_exceptions=False)


@pytest.fixture(scope="module")
def planted_files(tmp_path_factory, planted5):
    """The 1000-doc planted corpus written out as pipeline input files."""
    root = tmp_path_factory.mktemp("acceptance")
    corpus, emb, truth, groups = planted5
    corpus_path = root / "clean.tsv"
    emb_path = root / "emb.emb1"
    write_clean_corpus(corpus, corpus_path)
    write_embeddings(emb, emb_path)
    return {
        "root": root,
        "corpus": corpus,
        "emb": emb,
        "truth": truth,
        "groups": groups,
        "corpus_path": str(corpus_path),
        "emb_path": str(emb_path),
    }


class TestPlantedTopicRecovery:
    def test_full_pipeline_on_synthetic_corpus(self, planted_files, tmp_path):
        started = time.monotonic()
        out_dir = tmp_path / "run"
        result = run_cli(
            "fit",
            "--corpus", planted_files["corpus_path"],
            "--embeddings", planted_files["emb_path"],
            "--output-dir", out_dir,
            "--seed", 42,
        )
        elapsed = time.monotonic() - started
        assert result.exit_code == 0

        labels = {}
        for line in (out_dir / "labels.tsv").read_text(encoding="utf-8").splitlines():
            doc_id, label = line.split("\t")
            labels[doc_id] = int(label)
        found = np.array([labels[d.id] for d in planted_files["corpus"].docs])

        topics = read_topic_report(out_dir / "topics.tsv")
        assert len(topics) == 5, f"expected exactly 5 topics, found {len(topics)}"

        score = purity(found, planted_files["truth"])
        assert score >= 0.95, f"purity {score:.3f} below 0.95"

        keyword_lists = [[w for w, _ in t.keywords] for t in topics]
        td = topic_diversity(keyword_lists, top_n=10)
        assert td >= 0.9, f"topic diversity {td:.3f} below 0.9"

        vocab = build_vocabulary(planted_files["corpus"], VectorizeConfig())
        stats = cooccurrence_stats(planted_files["corpus"], vocab)
        _, tc_found, _ = topic_coherence(keyword_lists, stats, top_n=10)
        rng = np.random.default_rng(123)
        random_sets = [
            [str(w) for w in rng.choice(vocab.terms, 10, replace=False)] for _ in range(5)
        ]
        _, tc_random, _ = topic_coherence(random_sets, stats, top_n=10)
        assert tc_found - tc_random >= 0.3, f"TC gap {tc_found - tc_random:.3f} below 0.3"

        assert elapsed < 60.0, f"pipeline took {elapsed:.1f}s, budget is 60s"
        print(
            f"\nPASS planted-topic recovery: 5 topics, purity={score:.3f}, "
            f"td={td:.3f}, tc_gap={tc_found - tc_random:.3f}, {elapsed:.1f}s"
        )


class TestMinTopicSizeMonotonicity:
    def test_topic_count_ordering(self, planted_files):
        from srtopic.cluster import HdbscanParams

        counts = {}
        for mts in (5, 10, 20):
            cfg = FitConfig(hdbscan=HdbscanParams(min_cluster_size=mts))
            result = fit(planted_files["corpus"], planted_files["emb"], cfg)
            counts[mts] = result.n_topics
        assert counts[20] <= counts[10] <= counts[5], counts
        print(f"\nPASS min_topic_size monotonicity: {counts}")


class TestTopicCountControl:
    def test_reduce_to_fifteen_and_fourteen(self, planted20):
        corpus, emb, _, _ = planted20
        result = fit(corpus, emb, FitConfig(vectorize=VectorizeConfig(min_df=2)))
        assert result.n_topics >= 15, "fixture must start above 15 topics"
        labeled = int(np.sum(result.labels >= 0))

        r15 = reduce_num_topics(result, 15)
        assert r15.n_topics == 15
        assert int(np.sum(r15.labels >= 0)) == labeled
        assert sum(t.size for t in r15.topics) == labeled

        r14 = reduce_num_topics(r15, 14)
        assert r14.n_topics == 14
        assert int(np.sum(r14.labels >= 0)) == labeled
        assert sum(t.size for t in r14.topics) == labeled
        print(f"\nPASS topic-count control: {result.n_topics} -> 15 -> 14, docs conserved")


class TestOutlierResidue:
    def test_residue_equals_zero_vocab_docs(self, planted_files):
        corpus, emb = planted_files["corpus"], planted_files["emb"]
        result = fit(corpus, emb, FitConfig())
        dtm = count_matrix(corpus, result.vocab)
        reduced = reduce_outliers(result, dtm)
        zero_vocab = int(np.sum(np.asarray(dtm.counts.sum(axis=1)).ravel() == 0))
        assert zero_vocab == 0
        assert reduced.n_outliers == zero_vocab
        print(f"\nPASS outlier residue: {reduced.n_outliers} == {zero_vocab} zero-vocab docs")


class TestCtfidfOracle:
    def test_twenty_randomized_matrices(self):
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(20):
            n_classes = int(rng.integers(1, 8))
            n_terms = int(rng.integers(1, 15))
            tf = rng.integers(0, 12, size=(n_classes, n_terms))
            tf[:, int(rng.integers(0, n_terms))] += 1  # keep every class non-zero
            got = ctfidf(tf).weights
            total = tf.sum()
            avg = total / n_classes
            for c in range(n_classes):
                for t in range(n_terms):
                    f = tf[:, t].sum()
                    want = tf[c, t] * math.log(1.0 + avg / f) if tf[c, t] else 0.0
                    if want == 0.0:
                        assert got[c, t] == 0.0
                    else:
                        assert abs(got[c, t] - want) / abs(want) <= 1e-12
                    checked += 1
        print(f"\nPASS c-TF-IDF oracle: {checked} weights within 1e-12 relative")


class TestMetricBoundsAndAnchors:
    def test_anchors_and_sweep_bounds(self, planted_files, tmp_path):
        docs = [["a", "b"], ["a", "b"], ["c"], ["d"]]
        corp = CleanCorpus(
            docs=[CleanDocument(id=f"d{i}", tokens=t) for i, t in enumerate(docs)]
        )
        vocab = build_vocabulary(corp, VectorizeConfig(min_df=1, max_df=1.0))
        stats = cooccurrence_stats(corp, vocab)
        assert npmi_pair("a", "b", stats) == 1.0

        indep = CleanCorpus(
            docs=[
                CleanDocument(id="0", tokens=["a", "b"]),
                CleanDocument(id="1", tokens=["a"]),
                CleanDocument(id="2", tokens=["b"]),
                CleanDocument(id="3", tokens=["x"]),
            ]
        )
        stats2 = cooccurrence_stats(
            indep, build_vocabulary(indep, VectorizeConfig(min_df=1, max_df=1.0))
        )
        assert abs(npmi_pair("a", "b", stats2)) <= 1e-9

        assert topic_diversity([["a", "b"], ["c", "d"], ["e", "f"]], top_n=2) == 1.0

        out = tmp_path / "sweep.tsv"
        result = run_cli(
            "sweep",
            "--corpus", planted_files["corpus_path"],
            "--embeddings", planted_files["emb_path"],
            "--output", out,
            "--models", "bertopic,lda,nmf",
            "--topic-counts", "3,5",
            "--seeds", "42,43",
            "--lda-iterations", "120",
            "--lda-burn-in", "80",
            "--nmf-iterations", "100",
        )
        assert result.exit_code == 0
        rows = [l.split("\t") for l in out.read_text(encoding="utf-8").splitlines()[1:]]
        for row in rows:
            tc, td = float(row[4]), float(row[5])
            assert -1.0 <= tc <= 1.0, row
            assert 0.0 <= td <= 1.0, row
        print(f"\nPASS metric bounds and anchors: {len(rows)} sweep rows in range")


class TestLdaRecovery:
    def test_purity_across_seeds(self):
        rng = np.random.default_rng(0)
        vocabs = [list("abcde"), list("fghij")]
        docs = []
        for g in range(2):
            for d in range(100):
                tokens = [str(w) for w in rng.choice(vocabs[g], 15)]
                docs.append(CleanDocument(id=f"d{g * 100 + d}", tokens=tokens))
        corpus = CleanCorpus(docs=docs)
        vocab = build_vocabulary(corpus, VectorizeConfig(min_df=1, max_df=1.0))
        dtm = count_matrix(corpus, vocab)

        purities = []
        for seed in (42, 43, 44):
            model = lda_fit(dtm, LdaParams(K=2, seed=seed))
            per_topic = []
            for k in range(2):
                words = lda_top_words(model, k, 5)
                from_first = sum(1 for w in words if w in vocabs[0])
                per_topic.append(max(from_first, 5 - from_first) / 5)
            purities.append(float(np.mean(per_topic)))
        avg = float(np.mean(purities))
        assert avg >= 0.95, f"topic-word purity {avg:.3f} below 0.95"

        # bookkeeping invariants re-checked on every sweep of a fit
        lda_fit(dtm, LdaParams(K=2, seed=42, n_iterations=60, burn_in=30), validate_every=1)
        print(f"\nPASS LDA recovery: mean topic-word purity {avg:.3f}, counts consistent")


class TestNmf:
    def test_traces_and_rank_one(self):
        for seed in range(50):
            x = np.random.default_rng(seed).uniform(0, 1, (15, 20))
            model = nmf_fit(x, NmfParams(K=4, seed=seed, n_iterations=120))
            diffs = np.diff(model.objective_trace)
            assert np.all(diffs <= 1e-10), f"trace increased at seed {seed}"

        rng = np.random.default_rng(1)
        x = np.outer(rng.uniform(0.5, 1.5, 20), rng.uniform(0.5, 1.5, 30))
        model = nmf_fit(x, NmfParams(K=1, seed=42))
        bound = 1e-6 * float(np.sum(x * x))
        assert model.objective_trace[-1] < bound
        print(
            f"\nPASS NMF: 50 non-increasing traces; rank-1 residual "
            f"{model.objective_trace[-1]:.2e} < {bound:.2e}"
        )


class TestUmapNeighborPreservation:
    def test_three_blob_recall(self):
        points, _ = make_blobs_lowrank(n_blobs=3, per_blob=20, ambient_dim=64, noise=0.05)
        m = l2_normalize(
            EmbeddingMatrix(doc_ids=[f"p{i}" for i in range(60)], rows=points)
        )
        y = reduce(m, UmapParams(seed=42))
        assert y.shape == (60, 5)
        d_in = 1.0 - m.rows @ m.rows.T
        recall = float(
            np.mean(
                [
                    len(a & b) / 10
                    for a, b in zip(knn_sets(d_in, 10), knn_sets(euclidean_matrix(y), 10))
                ]
            )
        )
        assert recall >= 0.8, f"10-NN recall {recall:.3f} below 0.8"
        print(f"\nPASS neighbor preservation: mean 10-NN recall {recall:.3f}")


class TestDeterminism:
    def test_fit_and_sweep_reruns_byte_identical(self, tmp_path):
        corpus, emb, _, _ = make_planted_corpus(
            n_groups=5, docs_per_group=40, vocab_per_group=30, tokens_per_doc=15
        )
        corpus_path = tmp_path / "clean.tsv"
        emb_path = tmp_path / "emb.emb1"
        write_clean_corpus(corpus, corpus_path)
        write_embeddings(emb, emb_path)

        fit_dirs = []
        for name in ("f1", "f2"):
            out = tmp_path / name
            result = run_cli(
                "fit",
                "--corpus", corpus_path,
                "--embeddings", emb_path,
                "--output-dir", out,
                "--min-df", 2,
                "--min-topic-size", 5,
            )
            assert result.exit_code == 0
            fit_dirs.append(out)
        for name in ("topics.tsv", "labels.tsv"):
            assert (fit_dirs[0] / name).read_bytes() == (fit_dirs[1] / name).read_bytes()

        sweep_paths = []
        for name in ("s1.tsv", "s2.tsv"):
            out = tmp_path / name
            result = run_cli(
                "sweep",
                "--corpus", corpus_path,
                "--embeddings", emb_path,
                "--output", out,
                "--models", "bertopic,lda,nmf",
                "--topic-counts", "3,5",
                "--seeds", "42,42,42",
                "--min-df", 2,
                "--min-topic-size", 5,
                "--lda-iterations", 100,
                "--lda-burn-in", 60,
                "--nmf-iterations", 80,
            )
            assert result.exit_code == 0
            sweep_paths.append(out)
        assert sweep_paths[0].read_bytes() == sweep_paths[1].read_bytes()

        rows = [
            l.split("\t")
            for l in sweep_paths[0].read_text(encoding="utf-8").splitlines()[1:]
        ]
        per_run = [r for r in rows if r[3] != "mean"]
        for model in ("bertopic", "lda", "nmf"):
            for count in ("3", "5"):
                cell = {
                    (r[4], r[5]) for r in per_run if r[0] == model and r[2] == count
                }
                assert len(cell) == 1, f"variance across identical seeds in {model}@{count}"
        print("\nPASS determinism: byte-identical reruns, zero variance across [s,s,s]")


class TestPreprocessingConformance:
    def test_conformance(self):
        samples = fuzz_strings(10_000, seed=99)
        for s in samples:
            once = transliterate(s)
            assert transliterate(once) == once

        allowed = re.compile(r"^[a-zčćžšđ ]*$")
        for s in samples[:3000]:
            out = clean(transliterate(s))
            assert allowed.match(out)
            assert "  " not in out and out == out.strip()

        table = {"stigla": "stići", "dece": "dete", "deci": "dete"}
        raw = [
            RawDocument(id=f"r{i}", text=t)
            for i, t in enumerate(
                ["Вакцина је стигла", "deca dece deci", "ništa mapirano", *samples[:200]]
            )
        ]
        import tempfile

        with tempfile.NamedTemporaryFile(
            "w", suffix=".tsv", delete=False, encoding="utf-8"
        ) as fh:
            for k, v in table.items():
                fh.write(f"{k}\t{v}\n")
            table_path = fh.name
        partial = preprocess_corpus(raw, PreprocessConfig(level="partial"))
        full = preprocess_corpus(
            raw, PreprocessConfig(level="full", lemma_table_path=table_path)
        )
        diffs = 0
        for p_doc, f_doc in zip(partial.docs, full.docs):
            assert len(p_doc.tokens) == len(f_doc.tokens)
            for pt, ft in zip(p_doc.tokens, f_doc.tokens):
                if pt in table:
                    assert ft == table[pt]
                    diffs += 1
                else:
                    assert ft == pt
        assert diffs >= 3  # the seeded sentences exercise the table
        print("\nPASS preprocessing conformance: idempotent, clean charset, lemma-only diffs")
