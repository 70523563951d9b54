"""TREC run reranking by coherence interpolation, plus IR metrics.

A baseline run is reranked per query with
new_score = alpha * RSV_norm + (1 - alpha) * COH_norm, where both parts
are min-max normalized over the query's candidates (coherence is
polarity-oriented first; undefined coherence maps to 0). Ties keep the
baseline order, so alpha = 1 reproduces the input ranking exactly.

Metrics: MRR, P@10, MAP (depth 1000, binary relevance at grade >= 1)
and ERR@20 with the standard (2^grade - 1) / 2^max_grade mapping.
Queries with no relevant document in the qrels are skipped from every
mean, trec_eval style.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TextIO

from .scoring import CoherenceScore, oriented_value

log = logging.getLogger("cohkit")

RERANK_TAG = "coh-rerank"
DEFAULT_ALPHA_GRID = tuple(round(0.50 + 0.05 * i, 2) for i in range(11))


class RunFormatError(ValueError):
    """Malformed run file line."""


class QrelsFormatError(ValueError):
    """Malformed qrels file line."""


@dataclass(frozen=True, slots=True)
class RunEntry:
    query_id: str
    doc_id: str
    rank: int
    rsv: float
    tag: str


@dataclass(frozen=True)
class RankedRun:
    entries: tuple[RunEntry, ...]

    def by_query(self) -> dict[str, list[RunEntry]]:
        grouped: dict[str, list[RunEntry]] = {}
        for entry in self.entries:
            grouped.setdefault(entry.query_id, []).append(entry)
        return grouped

    def query_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for entry in self.entries:
            seen.setdefault(entry.query_id)
        return list(seen)


@dataclass(frozen=True)
class Qrels:
    judgments: Mapping[tuple[str, str], int]

    def grade(self, query_id: str, doc_id: str) -> int:
        return self.judgments.get((query_id, doc_id), 0)

    def max_grade(self) -> int:
        return max(self.judgments.values(), default=0)

    def relevant_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for (query_id, _), grade in self.judgments.items():
            if grade >= 1:
                counts[query_id] = counts.get(query_id, 0) + 1
        return counts


@dataclass(frozen=True)
class RerankConfig:
    alpha: float = 1.0
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHA_GRID
    coherence_model_id: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        for a in self.alpha_grid:
            if not 0.0 <= a <= 1.0:
                raise ValueError("alpha grid values must lie in [0, 1]")


def parse_run(lines: Iterable[str]) -> RankedRun:
    """Parse a 6-column TREC run: qid Q0 docid rank score tag.

    Validates per-query ranks (exactly 1..n after sorting) and that
    scores do not increase with rank. Duplicate (query, doc) pairs and
    malformed lines raise with their line number.
    """
    entries: list[RunEntry] = []
    seen: set[tuple[str, str]] = set()
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        parts = stripped.split()
        if len(parts) != 6:
            raise RunFormatError(f"line {line_no}: expected 6 fields, got {len(parts)}")
        query_id, _, doc_id, rank_text, rsv_text, tag = parts
        try:
            rank = int(rank_text)
            rsv = float(rsv_text)
        except ValueError as exc:
            raise RunFormatError(f"line {line_no}: bad rank or score: {exc}") from exc
        key = (query_id, doc_id)
        if key in seen:
            raise RunFormatError(f"line {line_no}: duplicate entry for {query_id}/{doc_id}")
        seen.add(key)
        entries.append(RunEntry(query_id, doc_id, rank, rsv, tag))
    if not entries:
        log.warning("run file is empty")

    ordered: list[RunEntry] = []
    grouped: dict[str, list[RunEntry]] = {}
    for entry in entries:
        grouped.setdefault(entry.query_id, []).append(entry)
    for query_id, group in grouped.items():
        group.sort(key=lambda e: e.rank)
        for position, entry in enumerate(group, start=1):
            if entry.rank != position:
                raise RunFormatError(
                    f"query {query_id}: rank {entry.rank} where {position} expected "
                    "(gap or duplicate rank)"
                )
        for earlier, later in zip(group, group[1:]):
            if later.rsv > earlier.rsv:
                raise RunFormatError(
                    f"query {query_id}: score increases from rank {earlier.rank} "
                    f"to {later.rank}"
                )
        ordered.extend(group)
    return RankedRun(tuple(ordered))


def parse_qrels(lines: Iterable[str]) -> Qrels:
    """Parse 4-column TREC qrels: qid 0 docid grade.

    Negative grades (present in some TREC judgment files) are clamped
    to 0 with a warning.
    """
    judgments: dict[tuple[str, str], int] = {}
    clamped = 0
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        parts = stripped.split()
        if len(parts) != 4:
            raise QrelsFormatError(f"line {line_no}: expected 4 fields, got {len(parts)}")
        query_id, _, doc_id, grade_text = parts
        try:
            grade = int(grade_text)
        except ValueError as exc:
            raise QrelsFormatError(f"line {line_no}: bad grade: {exc}") from exc
        if grade < 0:
            grade = 0
            clamped += 1
        key = (query_id, doc_id)
        if key in judgments:
            raise QrelsFormatError(f"line {line_no}: duplicate judgment for {query_id}/{doc_id}")
        judgments[key] = grade
    if clamped:
        log.warning("qrels: clamped %d negative grade(s) to 0", clamped)
    return Qrels(judgments)


def _min_max(values: Sequence[float]) -> list[float]:
    """Min-max scale to [0, 1]; constant input maps to all zeros."""
    lo, hi = min(values), max(values)
    if hi <= lo:
        return [0.0] * len(values)
    span = hi - lo
    return [(v - lo) / span for v in values]


def rerank(
    run: RankedRun,
    coherence: Mapping[str, CoherenceScore],
    config: RerankConfig,
) -> RankedRun:
    """Interpolate normalized RSV with normalized coherence per query.

    Documents without a coherence score are treated as undefined
    (normalized coherence 0) and counted in a warning. The output is a
    per-query permutation of the input with ranks reassigned.
    """
    missing = 0
    reranked: list[RunEntry] = []
    for query_id, group in run.by_query().items():
        rsv_norm = _min_max([e.rsv for e in group])
        oriented = []
        has_score = []
        for entry in group:
            score = coherence.get(entry.doc_id)
            if score is None:
                missing += 1
            defined = score is not None and score.defined
            has_score.append(defined)
            oriented.append(oriented_value(score) if defined else 0.0)
        defined_values = [v for v, ok in zip(oriented, has_score) if ok]
        if defined_values:
            lo, hi = min(defined_values), max(defined_values)
            span = hi - lo
            coh_norm = [
                ((v - lo) / span if span > 0.0 else 0.0) if ok else 0.0
                for v, ok in zip(oriented, has_score)
            ]
        else:
            coh_norm = [0.0] * len(group)
        mixed = [
            config.alpha * r + (1.0 - config.alpha) * c
            for r, c in zip(rsv_norm, coh_norm)
        ]
        # Stable sort: ties keep the baseline order.
        order = sorted(range(len(group)), key=lambda i: -mixed[i])
        for new_rank, i in enumerate(order, start=1):
            entry = group[i]
            reranked.append(
                RunEntry(query_id, entry.doc_id, new_rank, mixed[i], RERANK_TAG)
            )
    if missing:
        log.warning("rerank: %d run document(s) had no coherence score", missing)
    return RankedRun(tuple(reranked))


def write_run(run: RankedRun, fp: TextIO) -> None:
    for entry in run.entries:
        fp.write(
            f"{entry.query_id} Q0 {entry.doc_id} {entry.rank} {entry.rsv:.6f} {entry.tag}\n"
        )


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def _evaluated_queries(run: RankedRun, qrels: Qrels) -> tuple[list[str], int]:
    """Run queries that have at least one relevant judgment; skip count."""
    relevant = qrels.relevant_counts()
    query_ids = run.query_ids()
    kept = [q for q in query_ids if relevant.get(q, 0) > 0]
    if not kept:
        raise ValueError("run and qrels share no queries with relevant judgments")
    skipped = len(query_ids) - len(kept)
    if skipped:
        log.warning("ir-eval: skipped %d query/queries with no relevant judgments", skipped)
    return kept, skipped


def mrr(run: RankedRun, qrels: Qrels) -> float:
    """Mean reciprocal rank of the first relevant (grade >= 1) result."""
    kept, _ = _evaluated_queries(run, qrels)
    grouped = run.by_query()
    total = 0.0
    for query_id in kept:
        for entry in grouped.get(query_id, ()):
            if qrels.grade(query_id, entry.doc_id) >= 1:
                total += 1.0 / entry.rank
                break
    return total / len(kept)


def precision_at(run: RankedRun, qrels: Qrels, k: int = 10) -> float:
    """Mean fraction of relevant documents in the top k (denominator k)."""
    kept, _ = _evaluated_queries(run, qrels)
    grouped = run.by_query()
    total = 0.0
    for query_id in kept:
        hits = sum(
            1
            for entry in grouped.get(query_id, ())[:k]
            if qrels.grade(query_id, entry.doc_id) >= 1
        )
        total += hits / k
    return total / len(kept)


def mean_average_precision(run: RankedRun, qrels: Qrels, depth: int = 1000) -> float:
    """MAP over the top ``depth`` results with binary relevance."""
    kept, _ = _evaluated_queries(run, qrels)
    relevant_counts = qrels.relevant_counts()
    grouped = run.by_query()
    total = 0.0
    for query_id in kept:
        hits = 0
        precision_sum = 0.0
        for entry in grouped.get(query_id, ())[:depth]:
            if qrels.grade(query_id, entry.doc_id) >= 1:
                hits += 1
                precision_sum += hits / entry.rank
        total += precision_sum / relevant_counts[query_id]
    return total / len(kept)


def err_at(
    run: RankedRun, qrels: Qrels, k: int = 20, max_grade: int | None = None
) -> float:
    """Expected reciprocal rank at k under the cascade user model.

    Stop probability of a grade-g document is (2^g - 1) / 2^max_grade.
    """
    kept, _ = _evaluated_queries(run, qrels)
    grouped = run.by_query()
    if max_grade is None:
        max_grade = qrels.max_grade()
    denom = float(2 ** max(max_grade, 1))
    total = 0.0
    for query_id in kept:
        continue_p = 1.0
        err = 0.0
        for entry in grouped.get(query_id, ())[:k]:
            stop = (2 ** qrels.grade(query_id, entry.doc_id) - 1) / denom
            err += continue_p * stop / entry.rank
            continue_p *= 1.0 - stop
        total += err
    return total / len(kept)


def evaluate_run(run: RankedRun, qrels: Qrels, max_grade: int | None = None) -> dict[str, float]:
    """All four metrics of a run against qrels."""
    return {
        "mrr": mrr(run, qrels),
        "p10": precision_at(run, qrels, 10),
        "map": mean_average_precision(run, qrels, 1000),
        "err20": err_at(run, qrels, 20, max_grade),
    }


def alpha_sweep(
    run: RankedRun,
    coherence: Mapping[str, CoherenceScore],
    qrels: Qrels,
    config: RerankConfig,
) -> list[dict[str, float]]:
    """Evaluate the rerank at every alpha in the grid; one row per alpha."""
    rows = []
    for alpha in config.alpha_grid:
        step = RerankConfig(
            alpha=alpha,
            alpha_grid=config.alpha_grid,
            coherence_model_id=config.coherence_model_id,
        )
        metrics = evaluate_run(rerank(run, coherence, step), qrels)
        rows.append({"alpha": alpha, **metrics})
    return rows


def write_sweep_csv(rows: Sequence[dict[str, float]], fp: TextIO) -> None:
    writer = csv.writer(fp)
    writer.writerow(["alpha", "mrr", "p10", "map", "err20"])
    for row in rows:
        writer.writerow(
            [f"{row['alpha']:.2f}"]
            + [f"{row[name]:.6f}" for name in ("mrr", "p10", "map", "err20")]
        )
