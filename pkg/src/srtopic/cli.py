"""Command-line client for the topic-modeling service.

Every command sends one HTTP request. With --server the request goes to
a running instance; otherwise the app is mounted in-process and the
request travels through the same ASGI/validation stack. Options can
come from a JSON config file (--config); explicit flags win over the
file. Exit codes: 0 ok, 2 config error, 3 data error, 4 model failure.
"""

from __future__ import annotations

import asyncio
import json
import sys
from typing import Any

import click
import httpx


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise click.ClickException(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"config file is not valid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise click.ClickException("config file must contain a JSON object")
    return cfg


def _set_nested(payload: dict, name: str, value: Any) -> None:
    # flag names use "__" to address nested request fields
    keys = name.split("__")
    node = payload
    for key in keys[:-1]:
        node = node.setdefault(key, {})
    node[keys[-1]] = value


def _merge(config: dict, overrides: dict[str, Any]) -> dict:
    payload = json.loads(json.dumps(config))  # deep copy, JSON-safe
    for dotted, value in overrides.items():
        if value is not None:
            _set_nested(payload, dotted, value)
    return payload


def _post(server: str | None, path: str, payload: dict) -> httpx.Response:
    if server:
        try:
            return httpx.post(server.rstrip("/") + path, json=payload, timeout=None)
        except httpx.HTTPError as exc:
            click.echo(f"cannot reach server {server}: {exc}", err=True)
            sys.exit(1)

    from .service import create_app

    async def _call() -> httpx.Response:
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://srtopic.local", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(_call())


def _handle_error(resp: httpx.Response) -> dict:
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail")
    except json.JSONDecodeError:
        detail = None
    if isinstance(detail, dict) and "exit_code" in detail:
        click.echo(f"{detail.get('kind', 'error')}: {detail.get('message', '')}", err=True)
        sys.exit(int(detail["exit_code"]))
    # pydantic request validation problems arrive as a list of errors
    click.echo(f"request rejected ({resp.status_code}): {detail}", err=True)
    sys.exit(2 if resp.status_code == 422 else 1)


@click.group()
def main() -> None:
    """Topic modeling for Serbian short text; every subcommand talks to the
    service (a local in-process instance unless --server is given)."""


def _client_options(fn):
    fn = click.option(
        "--config", "config_path", default=None, help="JSON config file; flags override it."
    )(fn)
    fn = click.option(
        "--server", default=None, help="Base URL of a running service (default: in-process)."
    )(fn)
    return fn


def _payload(server, config_path, flags):
    return server, _merge(_load_config(config_path), flags)


@main.command()
@_client_options
@click.option("--corpus", "corpus_path", default=None, help="Raw corpus, one document per line.")
@click.option("--output", "output_path", default=None, help="Where to write the tokenized corpus.")
@click.option("--level", type=click.Choice(["partial", "full"]), default=None)
@click.option("--lemma-table", "lemma_table_path", default=None)
def preprocess(server, config_path, **flags: Any) -> None:
    """Tokenize a raw corpus at the chosen preprocessing level."""
    server, payload = _payload(server, config_path, flags)
    body = _handle_error(_post(server, "/preprocess", payload))
    click.echo(
        f"docs in: {body['n_docs']}  docs out: {body['n_docs']}  empty: {body['n_empty']}",
        err=True,
    )
    click.echo(body["output_path"])


_FIT_OPTIONS = [
    ("--corpus", "corpus_path", str),
    ("--embeddings", "embeddings_path", str),
    ("--output-dir", "output_dir", str),
    ("--level", "level", str),
    ("--seed", "seed", int),
    ("--n-keywords", "n_keywords", int),
    ("--nr-topics", "nr_topics", int),
    ("--min-df", "vectorize__min_df", int),
    ("--max-df", "vectorize__max_df", float),
    ("--stopwords", "vectorize__stopword_path", str),
    ("--max-vocab", "vectorize__max_vocab", int),
    ("--n-neighbors", "umap__n_neighbors", int),
    ("--n-components", "umap__n_components", int),
    ("--min-dist", "umap__min_dist", float),
    ("--n-epochs", "umap__n_epochs", int),
    ("--negative-sample-rate", "umap__negative_sample_rate", int),
    ("--learning-rate", "umap__learning_rate", float),
    ("--min-topic-size", "hdbscan__min_topic_size", int),
    ("--min-samples", "hdbscan__min_samples", int),
]


def _options(option_table):
    def wrap(fn):
        for flag, dotted, typ in reversed(option_table):
            fn = click.option(flag, dotted, type=typ, default=None)(fn)
        return fn

    return wrap


@main.command()
@_client_options
@_options(_FIT_OPTIONS)
@click.option("--reduce-outliers/--no-reduce-outliers", "reduce_outliers", default=None)
@click.option("--exclude-empty/--include-empty", "exclude_empty", default=None)
def fit(server, config_path, **flags: Any) -> None:
    """Fit the embedding-based topic model and write its artifacts."""
    server, payload = _payload(server, config_path, flags)
    body = _handle_error(_post(server, "/fit", payload))
    click.echo(
        f"topics: {body['n_topics']}  outliers: {body['n_outliers']}  "
        f"docs: {body['n_docs']}  excluded: {body['n_excluded']}",
        err=True,
    )
    click.echo(body["report_path"])
    click.echo(body["labels_path"])
    click.echo(body["snapshot_path"])


_BASELINE_OPTIONS = [
    ("--corpus", "corpus_path", str),
    ("--output-dir", "output_dir", str),
    ("--level", "level", str),
    ("--seed", "seed", int),
    ("--k", "k", int),
    ("--n-keywords", "n_keywords", int),
    ("--min-df", "vectorize__min_df", int),
    ("--max-df", "vectorize__max_df", float),
    ("--stopwords", "vectorize__stopword_path", str),
    ("--max-vocab", "vectorize__max_vocab", int),
]


@main.command(name="fit-lda")
@_client_options
@_options(_BASELINE_OPTIONS)
@click.option("--alpha", "lda__alpha", type=float, default=None)
@click.option("--beta", "lda__beta", type=float, default=None)
@click.option("--iterations", "lda__n_iterations", type=int, default=None)
@click.option("--burn-in", "lda__burn_in", type=int, default=None)
def fit_lda(server, config_path, **flags: Any) -> None:
    """Fit the Gibbs-sampled LDA baseline."""
    server, payload = _payload(server, config_path, flags)
    body = _handle_error(_post(server, "/fit/lda", payload))
    click.echo(f"topics: {body['n_topics']}  docs: {body['n_docs']}", err=True)
    click.echo(body["report_path"])
    click.echo(body["labels_path"])
    click.echo(body["snapshot_path"])


@main.command(name="fit-nmf")
@_client_options
@_options(_BASELINE_OPTIONS)
@click.option("--iterations", "nmf__n_iterations", type=int, default=None)
@click.option("--tol", "nmf__tol", type=float, default=None)
def fit_nmf(server, config_path, **flags: Any) -> None:
    """Fit the multiplicative-update NMF baseline on TF-IDF counts."""
    server, payload = _payload(server, config_path, flags)
    body = _handle_error(_post(server, "/fit/nmf", payload))
    click.echo(f"topics: {body['n_topics']}  docs: {body['n_docs']}", err=True)
    click.echo(body["report_path"])
    click.echo(body["labels_path"])
    click.echo(body["snapshot_path"])


@main.command(name="eval")
@_client_options
@click.option("--report", "report_path", default=None)
@click.option("--corpus", "corpus_path", default=None)
@click.option("--level", "level", type=click.Choice(["partial", "full"]), default=None)
@click.option("--top-n", "top_n", type=int, default=None)
@click.option("--epsilon", "epsilon", type=float, default=None)
@click.option("--min-df", "vectorize__min_df", type=int, default=None)
@click.option("--max-df", "vectorize__max_df", type=float, default=None)
@click.option("--stopwords", "vectorize__stopword_path", default=None)
@click.option("--max-vocab", "vectorize__max_vocab", type=int, default=None)
def eval_cmd(server, config_path, **flags: Any) -> None:
    """Recompute coherence and diversity for a saved topic report."""
    server, payload = _payload(server, config_path, flags)
    body = _handle_error(_post(server, "/eval", payload))
    click.echo(f"tc={body['tc']:.6f} td={body['td']:.6f}")


@main.command()
@_client_options
@click.option("--corpus", "corpus_path", default=None)
@click.option("--embeddings", "embeddings_path", default=None)
@click.option("--output", "output_path", default=None)
@click.option("--level", "level", type=click.Choice(["partial", "full"]), default=None)
@click.option("--models", "models", default=None, help="Comma-separated subset of bertopic,lda,nmf.")
@click.option("--topic-counts", "topic_counts", default=None, help="Comma-separated topic counts.")
@click.option("--seeds", "seeds", default=None, help="Comma-separated run seeds.")
@click.option("--top-n", "top_n", type=int, default=None)
@click.option("--min-df", "vectorize__min_df", type=int, default=None)
@click.option("--max-df", "vectorize__max_df", type=float, default=None)
@click.option("--stopwords", "vectorize__stopword_path", default=None)
@click.option("--max-vocab", "vectorize__max_vocab", type=int, default=None)
@click.option("--min-topic-size", "hdbscan__min_topic_size", type=int, default=None)
@click.option("--n-epochs", "umap__n_epochs", type=int, default=None)
@click.option("--lda-iterations", "lda__n_iterations", type=int, default=None)
@click.option("--lda-burn-in", "lda__burn_in", type=int, default=None)
@click.option("--nmf-iterations", "nmf__n_iterations", type=int, default=None)
def sweep(server, config_path, **flags: Any) -> None:
    """Score every (model, topic count, seed) cell and write the report."""
    for key in ("models", "topic_counts", "seeds"):
        if flags.get(key) is not None:
            parts = [p for p in str(flags[key]).split(",") if p]
            flags[key] = parts if key == "models" else [int(p) for p in parts]
    server, payload = _payload(server, config_path, flags)
    body = _handle_error(_post(server, "/sweep", payload))
    click.echo(f"cells: {body['n_cells']}", err=True)
    for row in body["aggregates"]:
        click.echo(
            f"{row['model']}\t{row['n_topics']}\ttc={row['tc']:.6f}\ttd={row['td']:.6f}",
            err=True,
        )
    click.echo(body["report_path"])


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host: str, port: int) -> None:
    """Run the service with uvicorn."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
