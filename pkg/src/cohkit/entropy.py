"""Entropy of discourse-entity n-grams and the derived coherence score.

The k-order model uses (k+1)-grams of the document-wide entity sequence
(k=0 means unigrams). Windows are contiguous and cross sentence
boundaries. Probabilities are maximum-likelihood, unsmoothed.

The primary mode scores the plain Shannon entropy of the n-gram
distribution. A "conditional" mode is also provided; see
conditional_entropy for how its probabilities are normalized.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .documents import AnnotatedDocument
from .grid import build_grid, entity_sequence
from .scoring import CoherenceScore, make_score

NGRAM = "ngram"
CONDITIONAL = "conditional"
ENTROPY_MODES = (NGRAM, CONDITIONAL)

# Floor for the reciprocal: a zero-entropy (fully repetitive) document
# gets the large but finite coherence 1/ZERO_ENTROPY_EPSILON.
ZERO_ENTROPY_EPSILON = 1e-6


@dataclass(frozen=True)
class NgramDistribution:
    n: int
    counts: Mapping[tuple[str, ...], int]
    total: int


@dataclass(frozen=True, slots=True)
class EntropyScore:
    order: int  # model order k; the distribution is over (k+1)-grams
    bits: float
    defined: bool = True


def ngram_counts(sequence: Sequence[str], n: int) -> NgramDistribution:
    """Count the contiguous length-n windows of an entity sequence.

    A sequence shorter than n yields an empty distribution (total 0).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    counts = Counter(
        tuple(sequence[i : i + n]) for i in range(len(sequence) - n + 1)
    )
    return NgramDistribution(n=n, counts=dict(counts), total=sum(counts.values()))


def shannon_entropy(dist: NgramDistribution) -> EntropyScore:
    """Base-2 Shannon entropy of an n-gram distribution.

    Terms are accumulated in sorted n-gram order so that documents with
    identical distributions produce bit-identical results regardless of
    insertion order (sentence permutations must tie exactly).
    """
    if dist.total == 0:
        return EntropyScore(order=dist.n - 1, bits=0.0, defined=False)
    total = float(dist.total)
    bits = -math.fsum(
        (count / total) * math.log2(count / total)
        for _, count in sorted(dist.counts.items())
    )
    return EntropyScore(order=dist.n - 1, bits=bits if bits > 0.0 else 0.0)


def conditional_entropy(sequence: Sequence[str], k: int) -> EntropyScore:
    """k-order conditional entropy of the entity sequence, k >= 1.

    Implements the expected conditional entropy
    -sum_e p(e) * sum_g p(g -> e) log2 p(g -> e), where g ranges over
    the k-grams observed immediately before e. The transition
    probability is normalized by the follower's occurrence count in the
    final window position (so the per-follower distribution sums to 1);
    note this conditions on the *following* entity, i.e. these are
    backward transition probabilities, while the outer weight p(e) is
    the plain unigram maximum-likelihood probability.
    """
    if k < 1:
        raise ValueError("conditional entropy needs k >= 1")
    windows = ngram_counts(sequence, k + 1)
    if windows.total == 0:
        return EntropyScore(order=k, bits=0.0, defined=False)

    follower_total: Counter[str] = Counter()
    by_follower: dict[str, dict[tuple[str, ...], int]] = {}
    for window, count in windows.counts.items():
        context, follower = window[:-1], window[-1]
        follower_total[follower] += count
        by_follower.setdefault(follower, {})[context] = count

    unigrams = Counter(sequence)
    total = float(len(sequence))
    outer = []
    for follower in sorted(by_follower):
        denom = float(follower_total[follower])
        inner = math.fsum(
            (count / denom) * math.log2(count / denom)
            for _, count in sorted(by_follower[follower].items())
        )
        outer.append((unigrams[follower] / total) * inner)
    bits = -math.fsum(outer)
    return EntropyScore(order=k, bits=bits if bits > 0.0 else 0.0)


def sequence_entropy(sequence: Sequence[str], order: int, mode: str = NGRAM) -> EntropyScore:
    """Entropy of an entity sequence under the chosen model order and mode."""
    if order < 0:
        raise ValueError("order must be >= 0")
    if mode not in ENTROPY_MODES:
        raise ValueError(f"unknown entropy mode: {mode!r}")
    if mode == CONDITIONAL and order >= 1:
        return conditional_entropy(sequence, order)
    return shannon_entropy(ngram_counts(sequence, order + 1))


def entropy_coherence(
    doc: AnnotatedDocument, order: int = 0, mode: str = NGRAM
) -> CoherenceScore:
    """Coherence of a document as the reciprocal entropy of its entity n-grams.

    Returns 1 / max(H, epsilon): fully repetitive documents (H = 0) get
    the capped maximum 1e6 instead of a division error. Documents with
    fewer entities than the window size are undefined and score 0.
    """
    sequence = entity_sequence(build_grid(doc))
    return coherence_from_sequence(sequence, order=order, mode=mode)


def coherence_from_sequence(
    sequence: Sequence[str], order: int = 0, mode: str = NGRAM
) -> CoherenceScore:
    """entropy_coherence on a precomputed entity sequence."""
    score = sequence_entropy(sequence, order, mode)
    model_id = f"entropy-{order}"
    if not score.defined:
        return make_score(model_id, 0.0, defined=False)
    return make_score(model_id, 1.0 / max(score.bits, ZERO_ENTROPY_EPSILON))
