"""Artifact serialization: topic reports, label files, sweep reports,
parameter snapshots. All files are UTF-8 with LF line endings and
6-decimal floats so reruns are byte-comparable.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import DataError
from .evaluation import EvalReport
from .topic_model import Topic, TopicModelResult

_FLOAT_FMT = "{:.6f}"


def write_topic_report(topics: list[Topic], path: str | Path) -> None:
    """TSV of topic_id, size and comma-joined term:weight keywords."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("topic_id\tsize\tkeywords\n")
        for t in topics:
            kws = ",".join(f"{w}:{_FLOAT_FMT.format(v)}" for w, v in t.keywords)
            fh.write(f"{t.id}\t{t.size}\t{kws}\n")


def read_topic_report(path: str | Path) -> list[Topic]:
    topics = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != "topic_id\tsize\tkeywords":
        raise DataError(f"{path}: not a topic report (bad header)")
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != 3:
            raise DataError(f"{path}: line {i} is not topic_id<TAB>size<TAB>keywords")
        topic_id, size, kws = parts
        keywords = []
        if kws:
            for item in kws.split(","):
                term, _, weight = item.rpartition(":")
                keywords.append((term, float(weight)))
        topics.append(Topic(id=int(topic_id), keywords=keywords, size=int(size)))
    return topics


def write_labels(doc_ids: list[str], labels, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc_id, label in zip(doc_ids, labels):
            fh.write(f"{doc_id}\t{int(label)}\n")


def write_snapshot(payload: dict, path: str | Path) -> None:
    """Canonical JSON capture of every effective parameter of a run."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def write_sweep_report(reports: list[EvalReport], path: str | Path) -> None:
    """Per-run rows followed by per-count mean rows (run_seed column 'mean')."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("model\tpreprocessing\tn_topics\trun_seed\ttc\ttd\n")
        for report in reports:
            for r in report.rows:
                fh.write(
                    f"{r.model}\t{r.preprocessing}\t{r.n_topics}\t{r.seed}\t"
                    f"{_FLOAT_FMT.format(r.tc)}\t{_FLOAT_FMT.format(r.td)}\n"
                )
        for report in reports:
            for r in report.aggregates:
                fh.write(
                    f"{r.model}\t{r.preprocessing}\t{r.n_topics}\tmean\t"
                    f"{_FLOAT_FMT.format(r.tc)}\t{_FLOAT_FMT.format(r.td)}\n"
                )


def file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def label_summary(result: TopicModelResult) -> dict:
    return {
        "n_topics": result.n_topics,
        "n_outliers": result.n_outliers,
        "topic_sizes": [t.size for t in result.topics],
    }
