"""Sentence-reordering evaluation: does the original outscore shuffles?

Each document is permuted k times (default 20) and the original is
compared against every permutation under a coherence model. A strict
polarity-oriented win is a true positive; ties count as failures but
are reported separately.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import random
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, TextIO

from .documents import AnnotatedDocument, renumber_sentences
from .scoring import CoherenceScore, oriented_value

log = logging.getLogger("cohkit")

Scorer = Callable[[AnnotatedDocument], CoherenceScore]


@dataclass(frozen=True)
class PermutationSet:
    doc_id: str
    original: AnnotatedDocument
    permutations: tuple[AnnotatedDocument, ...]
    seed: str


@dataclass(frozen=True)
class DocumentOutcome:
    doc_id: str
    wins: int
    ties: int
    losses: int


@dataclass(frozen=True)
class AccuracyReport:
    model_id: str
    per_document: tuple[DocumentOutcome, ...]
    wins: int
    ties: int
    losses: int
    skipped: int  # documents with < 2 sentences
    accuracy: float | None  # None when there were no comparisons

    @property
    def comparisons(self) -> int:
        return self.wins + self.ties + self.losses


def permute_document(doc: AnnotatedDocument, rng: random.Random) -> AnnotatedDocument:
    """Uniform non-identity sentence shuffle of a document.

    Sentence indices and token offsets are recomputed for the new
    order; within-sentence content is untouched.
    """
    n = len(doc.sentences)
    if n < 2:
        raise ValueError(f"{doc.doc_id}: cannot permute a document with {n} sentence(s)")
    order = list(range(n))
    while True:
        rng.shuffle(order)
        if any(i != p for i, p in enumerate(order)):
            break
    return renumber_sentences(doc.doc_id, [doc.sentences[i] for i in order])


def document_rng(seed: int | str, doc_id: str) -> random.Random:
    """Per-document RNG stream so parallel scheduling cannot change results."""
    return random.Random(f"{seed}:{doc_id}")


def sample_permutations(
    doc: AnnotatedDocument, k: int, seed: int | str
) -> PermutationSet:
    """Draw k sentence permutations of a document.

    Permutations are pairwise distinct whenever the document admits at
    least k distinct non-identity orderings; tiny documents (2-3
    sentences) fall back to sampling with repetition.
    """
    rng = document_rng(seed, doc.doc_id)
    n = len(doc.sentences)
    if n < 2:
        raise ValueError(f"{doc.doc_id}: cannot permute a document with {n} sentence(s)")
    distinct_available = math.factorial(n) - 1
    identity = tuple(range(n))
    permutations: list[AnnotatedDocument] = []
    seen: set[tuple[int, ...]] = set()
    while len(permutations) < k:
        order = list(range(n))
        rng.shuffle(order)
        signature = tuple(order)
        if signature == identity:
            continue
        if distinct_available >= k and signature in seen:
            continue
        seen.add(signature)
        permutations.append(
            renumber_sentences(doc.doc_id, [doc.sentences[i] for i in order])
        )
    return PermutationSet(doc.doc_id, doc, tuple(permutations), seed=str(seed))


def _compare(original: CoherenceScore, permuted: CoherenceScore) -> str:
    a, b = oriented_value(original), oriented_value(permuted)
    if a > b:
        return "win"
    if a == b:
        return "tie"
    return "loss"


def evaluate_document(
    doc: AnnotatedDocument, scorers: Mapping[str, Scorer], k: int, seed: int | str
) -> dict[str, DocumentOutcome]:
    """Score one document and its permutation set under several models.

    The permutations depend only on (seed, doc_id), so every model is
    compared on identical pairs.
    """
    perms = sample_permutations(doc, k, seed)
    outcomes: dict[str, DocumentOutcome] = {}
    for model_id, scorer in scorers.items():
        original_score = scorer(doc)
        tallies = {"win": 0, "tie": 0, "loss": 0}
        for permuted in perms.permutations:
            tallies[_compare(original_score, scorer(permuted))] += 1
        outcomes[model_id] = DocumentOutcome(
            doc.doc_id, tallies["win"], tallies["tie"], tallies["loss"]
        )
    return outcomes


def aggregate_reports(
    model_ids: Sequence[str],
    outcomes_per_doc: Sequence[Mapping[str, DocumentOutcome]],
    skipped: int,
) -> list[AccuracyReport]:
    """Fold per-document outcomes into one report per model."""
    reports = []
    for model_id in model_ids:
        outcomes = [outcome[model_id] for outcome in outcomes_per_doc]
        wins = sum(o.wins for o in outcomes)
        ties = sum(o.ties for o in outcomes)
        losses = sum(o.losses for o in outcomes)
        total = wins + ties + losses
        reports.append(
            AccuracyReport(
                model_id=model_id,
                per_document=tuple(outcomes),
                wins=wins,
                ties=ties,
                losses=losses,
                skipped=skipped,
                accuracy=(wins / total) if total else None,
            )
        )
    return reports


def split_usable(
    corpus: Sequence[AnnotatedDocument],
) -> tuple[list[AnnotatedDocument], int]:
    """Documents with >= 2 sentences, and the count of skipped ones."""
    if not corpus:
        raise ValueError("empty corpus")
    usable = [doc for doc in corpus if len(doc.sentences) >= 2]
    skipped = len(corpus) - len(usable)
    if skipped:
        log.warning("reorder-eval: skipped %d document(s) with < 2 sentences", skipped)
    return usable, skipped


def evaluate_reordering(
    corpus: Sequence[AnnotatedDocument],
    scorers: Mapping[str, Scorer],
    k: int = 20,
    seed: int | str = 0,
) -> list[AccuracyReport]:
    """Run the reordering protocol for every model over a corpus.

    Documents with fewer than 2 sentences are skipped and counted.
    Returns one report per model, in scorer order.
    """
    usable, skipped = split_usable(corpus)
    outcomes = [evaluate_document(doc, scorers, k, seed) for doc in usable]
    return aggregate_reports(list(scorers), outcomes, skipped)


def write_report_csv(reports: Sequence[AccuracyReport], fp: TextIO) -> None:
    writer = csv.writer(fp)
    writer.writerow(["doc_id", "model", "wins", "ties", "losses"])
    for report in reports:
        for outcome in sorted(report.per_document, key=lambda o: o.doc_id):
            writer.writerow(
                [outcome.doc_id, report.model_id, outcome.wins, outcome.ties, outcome.losses]
            )


def summary_dict(reports: Sequence[AccuracyReport], k: int, seed: int | str) -> dict:
    return {
        "k": k,
        "seed": str(seed),
        "models": {
            r.model_id: {
                "accuracy": round(r.accuracy, 6) if r.accuracy is not None else None,
                "wins": r.wins,
                "ties": r.ties,
                "losses": r.losses,
                "documents": len(r.per_document),
                "skipped": r.skipped,
            }
            for r in reports
        },
    }


def write_summary_json(
    reports: Sequence[AccuracyReport], fp: TextIO, k: int, seed: int | str
) -> None:
    json.dump(summary_dict(reports, k, seed), fp, indent=2, sort_keys=True)
    fp.write("\n")
