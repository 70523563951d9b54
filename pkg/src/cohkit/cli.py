"""Command line front end: score, reorder-eval, rerank, ir-eval, export-graph.

Every command is deterministic given its flags (and seed). Numeric
output uses 6 decimal places so golden-file comparisons are stable.
The COHKIT_LOG environment variable sets the log level.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial, wraps
from pathlib import Path

import click

from .documents import AnnotatedDocument, InterchangeError, load_documents, truncate_sentences
from .graphs import Weighting, build_bipartite, project
from .grid import build_grid
from .models import (
    ModelScorer,
    ScoreConfig,
    reorder_config,
    resolve_models,
    score_models,
)
from .reorder import (
    aggregate_reports,
    evaluate_document,
    split_usable,
    summary_dict,
    write_report_csv,
)
from .rerank import (
    DEFAULT_ALPHA_GRID,
    QrelsFormatError,
    RerankConfig,
    RunFormatError,
    alpha_sweep,
    evaluate_run,
    parse_qrels,
    parse_run,
    rerank as rerank_run,
    write_run,
    write_sweep_csv,
)
from .scoring import CoherenceScore, make_score, normalize_collection, oriented_value

log = logging.getLogger("cohkit")

WEIGHTING_CHOICES = [w.value for w in Weighting]


def main():
    logging.basicConfig(
        level=os.environ.get("COHKIT_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    cli(prog_name="cohkit")


@click.group()
def cli():
    """Coherence scoring of annotated documents, and its IR applications."""


def _friendly_errors(func):
    """Turn data-format and IO failures into clean CLI errors (exit 1)."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (InterchangeError, RunFormatError, QrelsFormatError, ValueError, OSError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _merge_manifest(ctx: click.Context, manifest_path: str | None, values: dict) -> dict:
    """Overlay manifest JSON onto flag defaults; explicit flags win."""
    if not manifest_path:
        return values
    with open(manifest_path, encoding="utf-8") as fp:
        manifest = json.load(fp)
    alias = {}
    for param in ctx.command.params:
        longs = [o for o in param.opts if o.startswith("--")]
        if longs:
            alias[longs[0][2:].replace("-", "_")] = param.name
    merged = dict(values)
    for key, value in manifest.items():
        name = alias.get(key.replace("-", "_"))
        if name is None or name == "manifest":
            raise click.ClickException(f"manifest: unknown key {key!r}")
        source = ctx.get_parameter_source(name)
        if source is None or source.name == "DEFAULT":
            merged[name] = value
    return merged


def _require(values: dict, *names: str) -> None:
    for name in names:
        if values.get(name) in (None, (), []):
            raise click.UsageError(f"missing required option --{name.replace('_', '-')}")


def _open_out(path: str):
    if path == "-":
        return sys.stdout
    return io.open(path, "w", encoding="utf-8")


def _load_corpus(path: str, strip_plural: bool, max_terms: int) -> list[AnnotatedDocument]:
    if path == "-":
        docs = load_documents(sys.stdin, strip_plural=strip_plural)
    else:
        docs = load_documents(path, strip_plural=strip_plural)
    if max_terms > 0:
        docs = [truncate_sentences(doc, max_terms) for doc in docs]
    return docs


def _parallel_map(func, items, threads: int | None):
    threads = threads or os.cpu_count() or 1
    if threads > 1 and len(items) > 1:
        chunk = max(1, len(items) // (threads * 4))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, items, chunksize=chunk))
    return [func(item) for item in items]


def _fmt(value: float) -> str:
    return f"{value:.6f}"


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------


def _score_worker(doc: AnnotatedDocument, model_ids, config) -> tuple[str, dict]:
    return doc.doc_id, score_models(doc, model_ids, config)


@cli.command("score")
@click.option("--in", "input_path", type=str, default=None, help="Corpus JSONL ('-' for stdin).")
@click.option("--model", "models", multiple=True, default=("all",), show_default=True)
@click.option("--order", type=click.IntRange(0, 2), default=0, show_default=True)
@click.option("--mode", "entropy_mode", type=click.Choice(["ngram", "conditional"]),
              default="ngram", show_default=True)
@click.option("--weighting", type=click.Choice(WEIGHTING_CHOICES), default="unweighted",
              show_default=True)
@click.option("--damping", type=float, default=0.85, show_default=True)
@click.option("--max-terms", type=int, default=60, show_default=True,
              help="Cut sentences to this many tokens; 0 disables.")
@click.option("--strip-plural", is_flag=True, help="Strip plural 's' from entity keys.")
@click.option("--threads", type=int, default=None, help="Worker processes (default: cores).")
@click.option("--out", "out_path", type=str, default="-", show_default=True)
@click.option("--manifest", type=click.Path(exists=True), default=None,
              help="JSON file mirroring these flags.")
@click.pass_context
@_friendly_errors
def cmd_score(ctx, **values):
    """Score documents; one CSV row per (document, model)."""
    values = _merge_manifest(ctx, values.pop("manifest"), values)
    _require(values, "input_path")
    model_ids = resolve_models(tuple(values["models"]), values["order"])
    config = ScoreConfig(
        order=values["order"],
        entropy_mode=values["entropy_mode"],
        weighting=Weighting(values["weighting"]),
        damping=values["damping"],
    )
    docs = _load_corpus(values["input_path"], values["strip_plural"], values["max_terms"])
    results = _parallel_map(
        partial(_score_worker, model_ids=model_ids, config=config), docs, values["threads"]
    )
    rows = []
    flat_scores: list[CoherenceScore] = []
    for doc_id, scores in results:
        for model_id in model_ids:
            rows.append((doc_id, model_id, scores[model_id]))
            flat_scores.append(scores[model_id])
    normalized = normalize_collection(flat_scores)

    indexed = sorted(range(len(rows)), key=lambda i: (rows[i][0], rows[i][1]))
    out = _open_out(values["out_path"])
    try:
        writer = csv.writer(out)
        writer.writerow(["doc_id", "model", "raw", "oriented", "normalized", "defined"])
        for i in indexed:
            doc_id, model_id, score = rows[i]
            oriented = oriented_value(score) if score.defined else 0.0
            writer.writerow(
                [
                    doc_id,
                    model_id,
                    _fmt(score.raw),
                    _fmt(oriented),
                    _fmt(normalized[i]),
                    "true" if score.defined else "false",
                ]
            )
    finally:
        if out is not sys.stdout:
            out.close()


# ---------------------------------------------------------------------------
# reorder-eval
# ---------------------------------------------------------------------------


@cli.command("reorder-eval")
@click.option("--in", "input_path", type=str, default=None, help="Corpus JSONL ('-' for stdin).")
@click.option("--model", "models", multiple=True, default=("all",), show_default=True)
@click.option("--order", type=click.IntRange(0, 2), default=0, show_default=True)
@click.option("--mode", "entropy_mode", type=click.Choice(["ngram", "conditional"]),
              default="ngram", show_default=True)
@click.option("--weighting", type=click.Choice(WEIGHTING_CHOICES), default=None,
              help="Default: distance for pagerank/betweenness, unweighted otherwise.")
@click.option("--damping", type=float, default=0.85, show_default=True)
@click.option("--k", type=int, default=20, show_default=True, help="Permutations per document.")
@click.option("--seed", type=str, default=None, help="RNG seed (required).")
@click.option("--max-terms", type=int, default=60, show_default=True)
@click.option("--strip-plural", is_flag=True)
@click.option("--threads", type=int, default=None)
@click.option("--out", "out_path", type=str, default=None,
              help="Report CSV path; a JSON summary lands next to it.")
@click.option("--manifest", type=click.Path(exists=True), default=None)
@click.pass_context
@_friendly_errors
def cmd_reorder_eval(ctx, **values):
    """Sentence-reordering accuracy of coherence models over a corpus."""
    values = _merge_manifest(ctx, values.pop("manifest"), values)
    _require(values, "input_path", "seed", "out_path")
    if values["k"] < 0:
        raise click.UsageError("--k must be >= 0")
    model_ids = resolve_models(tuple(values["models"]), values["order"])
    explicit_weighting = values["weighting"] is not None
    base = ScoreConfig(
        order=values["order"],
        entropy_mode=values["entropy_mode"],
        weighting=Weighting(values["weighting"]) if explicit_weighting else Weighting.UNWEIGHTED,
        damping=values["damping"],
    )
    scorers = {
        model_id: ModelScorer(model_id, reorder_config(model_id, base, explicit_weighting))
        for model_id in model_ids
    }
    docs = _load_corpus(values["input_path"], values["strip_plural"], values["max_terms"])
    usable, skipped = split_usable(docs)
    if values["k"] == 0:
        log.warning("reorder-eval: k = 0, report is vacuous and accuracy undefined")
        outcomes = []
        reports = aggregate_reports(model_ids, outcomes, skipped)
    else:
        outcomes = _parallel_map(
            partial(evaluate_document, scorers=scorers, k=values["k"], seed=values["seed"]),
            usable,
            values["threads"],
        )
        reports = aggregate_reports(model_ids, outcomes, skipped)

    out_path = Path(values["out_path"])
    with io.open(out_path, "w", encoding="utf-8", newline="") as fp:
        write_report_csv(reports, fp)
    json_path = out_path.with_suffix(".json") if out_path.suffix == ".csv" \
        else Path(str(out_path) + ".json")
    with io.open(json_path, "w", encoding="utf-8") as fp:
        json.dump(summary_dict(reports, values["k"], values["seed"]), fp, indent=2,
                  sort_keys=True)
        fp.write("\n")
    for report in reports:
        accuracy = "n/a" if report.accuracy is None else _fmt(report.accuracy)
        click.echo(
            f"{report.model_id}: accuracy {accuracy} "
            f"(wins {report.wins}, ties {report.ties}, losses {report.losses})"
        )


# ---------------------------------------------------------------------------
# rerank and ir-eval
# ---------------------------------------------------------------------------


def _parse_alpha_grid(text: str) -> tuple[float, ...]:
    if text == "default":
        return DEFAULT_ALPHA_GRID
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise click.UsageError("--alpha-grid expects start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise click.UsageError("--alpha-grid step must be positive")
        grid = []
        value = start
        while value <= stop + 1e-9:
            grid.append(round(value, 6))
            value += step
        return tuple(grid)
    return tuple(float(p) for p in text.split(","))


def _load_score_file(path: str, model_id: str) -> dict[str, CoherenceScore]:
    scores: dict[str, CoherenceScore] = {}
    with io.open(path, "r", encoding="utf-8") as fp:
        for row in csv.DictReader(fp):
            if row["model"] != model_id:
                continue
            scores[row["doc_id"]] = make_score(
                model_id, float(row["raw"]), defined=row["defined"] == "true"
            )
    if not scores:
        raise click.ClickException(f"score file has no rows for model {model_id!r}")
    return scores


@cli.command("rerank")
@click.option("--run", "run_path", type=str, default=None, help="Baseline TREC run file.")
@click.option("--in", "input_path", type=str, default=None,
              help="Corpus JSONL to score (alternative to --scores).")
@click.option("--scores", "scores_path", type=str, default=None,
              help="Precomputed score CSV from `cohkit score`.")
@click.option("--qrels", "qrels_path", type=str, default=None)
@click.option("--model", "models", multiple=True, default=("entropy",), show_default=True)
@click.option("--order", type=click.IntRange(0, 2), default=0, show_default=True)
@click.option("--mode", "entropy_mode", type=click.Choice(["ngram", "conditional"]),
              default="ngram", show_default=True)
@click.option("--weighting", type=click.Choice(WEIGHTING_CHOICES), default="unweighted",
              show_default=True)
@click.option("--damping", type=float, default=0.85, show_default=True)
@click.option("--alpha", type=click.FloatRange(0.0, 1.0), default=None,
              help="Interpolation weight on the baseline RSV (required).")
@click.option("--alpha-grid", type=str, default=None,
              help="'default', comma list, or start:stop:step; needs --qrels.")
@click.option("--max-grade", type=int, default=None, help="ERR grade ceiling.")
@click.option("--max-terms", type=int, default=60, show_default=True)
@click.option("--strip-plural", is_flag=True)
@click.option("--threads", type=int, default=None)
@click.option("--out", "out_path", type=str, default=None, help="Reranked run path.")
@click.option("--manifest", type=click.Path(exists=True), default=None)
@click.pass_context
@_friendly_errors
def cmd_rerank(ctx, **values):
    """Rerank a run by interpolating RSV with coherence."""
    values = _merge_manifest(ctx, values.pop("manifest"), values)
    _require(values, "run_path", "alpha", "out_path")
    if bool(values["input_path"]) == bool(values["scores_path"]):
        raise click.UsageError("provide exactly one of --in or --scores")
    model_ids = resolve_models(tuple(values["models"]), values["order"])
    if len(model_ids) != 1:
        raise click.UsageError("rerank expects exactly one model")
    model_id = model_ids[0]

    with io.open(values["run_path"], "r", encoding="utf-8") as fp:
        run = parse_run(fp)

    if values["scores_path"]:
        coherence = _load_score_file(values["scores_path"], model_id)
    else:
        config = ScoreConfig(
            order=values["order"],
            entropy_mode=values["entropy_mode"],
            weighting=Weighting(values["weighting"]),
            damping=values["damping"],
        )
        docs = _load_corpus(values["input_path"], values["strip_plural"], values["max_terms"])
        scored = _parallel_map(
            partial(_score_worker, model_ids=[model_id], config=config),
            docs,
            values["threads"],
        )
        coherence = {doc_id: scores[model_id] for doc_id, scores in scored}

    config = RerankConfig(alpha=values["alpha"], coherence_model_id=model_id)
    reranked = rerank_run(run, coherence, config)
    with io.open(values["out_path"], "w", encoding="utf-8") as fp:
        write_run(reranked, fp)

    if values["qrels_path"]:
        with io.open(values["qrels_path"], "r", encoding="utf-8") as fp:
            qrels = parse_qrels(fp)
        metrics = evaluate_run(reranked, qrels, values["max_grade"])
        metrics_path = values["out_path"] + ".metrics.csv"
        with io.open(metrics_path, "w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(["alpha", "mrr", "p10", "map", "err20"])
            writer.writerow([f"{values['alpha']:.2f}"] +
                            [_fmt(metrics[m]) for m in ("mrr", "p10", "map", "err20")])
        click.echo(
            f"alpha {values['alpha']:.2f}: "
            + " ".join(f"{name}={_fmt(metrics[name])}" for name in ("mrr", "p10", "map", "err20"))
        )
        if values["alpha_grid"]:
            grid = _parse_alpha_grid(values["alpha_grid"])
            sweep_config = RerankConfig(
                alpha=values["alpha"], alpha_grid=grid, coherence_model_id=model_id
            )
            rows = alpha_sweep(run, coherence, qrels, sweep_config)
            sweep_path = values["out_path"] + ".sweep.csv"
            with io.open(sweep_path, "w", encoding="utf-8", newline="") as fp:
                write_sweep_csv(rows, fp)
    elif values["alpha_grid"]:
        raise click.UsageError("--alpha-grid needs --qrels to evaluate against")


@cli.command("ir-eval")
@click.option("--run", "run_path", type=str, required=True)
@click.option("--qrels", "qrels_path", type=str, required=True)
@click.option("--max-grade", type=int, default=None)
@click.option("--out", "out_path", type=str, default="-", show_default=True)
@_friendly_errors
def cmd_ir_eval(run_path, qrels_path, max_grade, out_path):
    """Evaluate a run file: MRR, P@10, MAP, ERR@20."""
    with io.open(run_path, "r", encoding="utf-8") as fp:
        run = parse_run(fp)
    with io.open(qrels_path, "r", encoding="utf-8") as fp:
        qrels = parse_qrels(fp)
    metrics = evaluate_run(run, qrels, max_grade)
    out = _open_out(out_path)
    try:
        writer = csv.writer(out)
        writer.writerow(["mrr", "p10", "map", "err20"])
        writer.writerow([_fmt(metrics[m]) for m in ("mrr", "p10", "map", "err20")])
    finally:
        if out is not sys.stdout:
            out.close()
            click.echo(
                " ".join(f"{name}={_fmt(metrics[name])}" for name in ("mrr", "p10", "map", "err20"))
            )


@cli.command("export-graph")
@click.option("--in", "input_path", type=str, required=True)
@click.option("--weighting", type=click.Choice(WEIGHTING_CHOICES), default="unweighted",
              show_default=True)
@click.option("--max-terms", type=int, default=60, show_default=True)
@click.option("--strip-plural", is_flag=True)
@click.option("--out", "out_path", type=str, default="-", show_default=True)
@_friendly_errors
def cmd_export_graph(input_path, weighting, max_terms, strip_plural, out_path):
    """Dump projection edge lists (u v weight) for debugging."""
    docs = _load_corpus(input_path, strip_plural, max_terms)
    out = _open_out(out_path)
    try:
        for doc in sorted(docs, key=lambda d: d.doc_id):
            graph = project(build_bipartite(build_grid(doc)), Weighting(weighting))
            out.write(f"# {doc.doc_id}\n")
            for line in graph.edge_lines():
                out.write(line + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    main()
