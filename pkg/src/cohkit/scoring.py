"""Coherence score values, model identifiers, polarity, and normalization.

Every scoring model emits a CoherenceScore: a raw value, a flag for
whether the value is defined on the input, and a polarity saying which
direction means "more coherent". Cross-document comparisons always go
through polarity-oriented values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence


class Polarity(Enum):
    HIGHER_MORE_COHERENT = "higher"
    LOWER_MORE_COHERENT = "lower"


ENTROPY_0 = "entropy-0"
ENTROPY_1 = "entropy-1"
ENTROPY_2 = "entropy-2"
PAGERANK = "pagerank"
CLUSTERING = "clustering"
BETWEENNESS = "betweenness"
ENTITY_DISTANCE = "entity-distance"
ATF = "atf"
AWTF = "awtf"
NATF = "natf"
NAWTF = "nawtf"

GRAPH_MODELS: tuple[str, ...] = (
    PAGERANK,
    CLUSTERING,
    BETWEENNESS,
    ENTITY_DISTANCE,
    ATF,
    AWTF,
    NATF,
    NAWTF,
)
ENTROPY_MODELS: tuple[str, ...] = (ENTROPY_0, ENTROPY_1, ENTROPY_2)
ALL_MODELS: tuple[str, ...] = ENTROPY_MODELS + GRAPH_MODELS

# Connectivity-style metrics fall as documents get more coherent; the rest rise.
POLARITY: dict[str, Polarity] = {
    ENTROPY_0: Polarity.HIGHER_MORE_COHERENT,
    ENTROPY_1: Polarity.HIGHER_MORE_COHERENT,
    ENTROPY_2: Polarity.HIGHER_MORE_COHERENT,
    PAGERANK: Polarity.LOWER_MORE_COHERENT,
    CLUSTERING: Polarity.LOWER_MORE_COHERENT,
    BETWEENNESS: Polarity.HIGHER_MORE_COHERENT,
    ENTITY_DISTANCE: Polarity.HIGHER_MORE_COHERENT,
    ATF: Polarity.HIGHER_MORE_COHERENT,
    AWTF: Polarity.HIGHER_MORE_COHERENT,
    NATF: Polarity.HIGHER_MORE_COHERENT,
    NAWTF: Polarity.HIGHER_MORE_COHERENT,
}


@dataclass(frozen=True, slots=True)
class CoherenceScore:
    model_id: str
    raw: float
    polarity: Polarity
    defined: bool = True


def make_score(model_id: str, raw: float, defined: bool = True) -> CoherenceScore:
    if model_id not in POLARITY:
        raise ValueError(f"unknown model id: {model_id!r}")
    return CoherenceScore(model_id, raw if defined else 0.0, POLARITY[model_id], defined)


def oriented_value(score: CoherenceScore) -> float:
    """Value on a shared scale where larger always means more coherent.

    Undefined scores compare below every defined one and tie each other.
    """
    if not score.defined:
        return -math.inf
    if score.polarity is Polarity.LOWER_MORE_COHERENT:
        return -score.raw
    return score.raw


def normalize_collection(scores: Sequence[CoherenceScore]) -> list[float]:
    """Scale raw scores into [0, 1] by the per-model collection maximum.

    Undefined scores map to 0. Raw values are assumed non-negative,
    which holds for every model in this package.
    """
    max_raw: dict[str, float] = {}
    for score in scores:
        if score.defined:
            current = max_raw.get(score.model_id)
            if current is None or score.raw > current:
                max_raw[score.model_id] = score.raw
    normalized = []
    for score in scores:
        top = max_raw.get(score.model_id, 0.0)
        if not score.defined or top <= 0.0:
            normalized.append(0.0)
        else:
            normalized.append(score.raw / top)
    return normalized
