"""Model registry: map model ids to scorers and share per-document work."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .documents import AnnotatedDocument
from .entropy import ENTROPY_MODES, NGRAM, coherence_from_sequence
from .graphs import (
    GraphMetricConfig,
    Weighting,
    atf,
    avg_betweenness,
    awtf,
    build_bipartite,
    clustering_coefficient,
    entity_distance,
    natf,
    nawtf,
    pagerank_median,
    project,
)
from .grid import build_grid, entity_sequence
from .scoring import (
    ALL_MODELS,
    ATF,
    AWTF,
    BETWEENNESS,
    CLUSTERING,
    ENTITY_DISTANCE,
    ENTROPY_MODELS,
    NATF,
    NAWTF,
    PAGERANK,
    CoherenceScore,
)


@dataclass(frozen=True)
class ScoreConfig:
    """Knobs shared by all scorers; defaults match standalone scoring."""

    order: int = 0
    entropy_mode: str = NGRAM
    weighting: Weighting = Weighting.UNWEIGHTED
    damping: float = 0.85
    pagerank_epsilon: float = 1e-10
    pagerank_max_iters: int = 200

    def __post_init__(self):
        if self.order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        if self.entropy_mode not in ENTROPY_MODES:
            raise ValueError(f"unknown entropy mode: {self.entropy_mode!r}")

    def graph_config(self) -> GraphMetricConfig:
        return GraphMetricConfig(
            damping=self.damping,
            pagerank_epsilon=self.pagerank_epsilon,
            pagerank_max_iters=self.pagerank_max_iters,
            weighting=self.weighting,
        )


def resolve_models(requested: tuple[str, ...] | list[str], order: int = 0) -> list[str]:
    """Expand CLI-style model names into canonical model ids.

    "all" expands to the entropy model at the requested order plus the
    eight graph models. "entropy" picks the order-k entropy model.
    """
    resolved: list[str] = []
    for name in requested:
        if name == "all":
            resolved.extend([f"entropy-{order}", *_GRAPH_ORDER])
        elif name == "entropy":
            resolved.append(f"entropy-{order}")
        elif name in ALL_MODELS:
            resolved.append(name)
        else:
            raise ValueError(f"unknown model: {name!r}")
    seen: set[str] = set()
    unique = []
    for model in resolved:
        if model not in seen:
            seen.add(model)
            unique.append(model)
    return unique


_GRAPH_ORDER = (PAGERANK, CLUSTERING, BETWEENNESS, ENTITY_DISTANCE, ATF, AWTF, NATF, NAWTF)


def score_models(
    doc: AnnotatedDocument,
    model_ids: list[str] | tuple[str, ...],
    config: ScoreConfig | None = None,
) -> dict[str, CoherenceScore]:
    """Score one document under several models, sharing the grid and graph."""
    config = config or ScoreConfig()
    grid = None
    sequence = None
    graph = None

    def need_grid():
        nonlocal grid
        if grid is None:
            grid = build_grid(doc)
        return grid

    def need_graph():
        nonlocal graph
        if graph is None:
            graph = project(build_bipartite(need_grid()), config.weighting)
        return graph

    scores: dict[str, CoherenceScore] = {}
    for model_id in model_ids:
        if model_id in ENTROPY_MODELS:
            if sequence is None:
                sequence = entity_sequence(need_grid())
            order = int(model_id.rsplit("-", 1)[1])
            scores[model_id] = coherence_from_sequence(
                sequence, order=order, mode=config.entropy_mode
            )
        elif model_id == PAGERANK:
            scores[model_id] = pagerank_median(need_graph(), config.graph_config())
        elif model_id == CLUSTERING:
            scores[model_id] = clustering_coefficient(need_graph())
        elif model_id == BETWEENNESS:
            scores[model_id] = avg_betweenness(need_graph())
        elif model_id == ENTITY_DISTANCE:
            scores[model_id] = entity_distance(doc)
        elif model_id == ATF:
            scores[model_id] = atf(need_grid())
        elif model_id == AWTF:
            scores[model_id] = awtf(need_grid())
        elif model_id == NATF:
            scores[model_id] = natf(need_grid())
        elif model_id == NAWTF:
            scores[model_id] = nawtf(need_grid())
        else:
            raise ValueError(f"unknown model id: {model_id!r}")
    return scores


def score_document(
    doc: AnnotatedDocument, model_id: str, config: ScoreConfig | None = None
) -> CoherenceScore:
    return score_models(doc, [model_id], config)[model_id]


@dataclass(frozen=True)
class ModelScorer:
    """Picklable single-model scorer for worker pools."""

    model_id: str
    config: ScoreConfig = ScoreConfig()

    def __call__(self, doc: AnnotatedDocument) -> CoherenceScore:
        return score_document(doc, self.model_id, self.config)


def reorder_config(model_id: str, config: ScoreConfig, explicit_weighting: bool) -> ScoreConfig:
    """Per-model config for the reordering task.

    Unless the caller pinned a weighting, PageRank and betweenness use
    distance-discounted projections there: on unweighted projections
    both are invariant under sentence permutations and tie every
    comparison.
    """
    if explicit_weighting:
        return config
    if model_id in (PAGERANK, BETWEENNESS):
        return replace(config, weighting=Weighting.DISTANCE_DISCOUNTED)
    return config
