"""Sentence-entity graphs and the graph-topology coherence metrics.

A document maps to a bipartite graph (sentences in one partition,
entities in the other, edges for containment) and from there to an
undirected projection over sentences, with an edge wherever two
sentences share at least one entity. Projections can be unweighted,
weighted by the shared-entity count, or weighted by shared count
discounted by sentence distance.

Eight metrics turn these structures into coherence scores: median
PageRank, global clustering coefficient, average betweenness, inverse
entity distance, and four topic-flow averages over adjacent or all
sentence pairs.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass
from enum import Enum
from heapq import heappop, heappush
from typing import Iterator

from .documents import AnnotatedDocument
from .grid import EntityGrid, sentence_entity_sets
from .scoring import (
    ATF,
    AWTF,
    BETWEENNESS,
    CLUSTERING,
    ENTITY_DISTANCE,
    NATF,
    NAWTF,
    PAGERANK,
    CoherenceScore,
    make_score,
)

# Two weighted shortest-path lengths closer than this are treated as
# equal when counting shortest paths. Weights come from small integer
# ratios, so genuinely distinct lengths are far wider apart.
_LENGTH_TOLERANCE = 1e-12


class Weighting(Enum):
    UNWEIGHTED = "unweighted"
    SHARED_COUNT = "shared"
    DISTANCE_DISCOUNTED = "distance"


@dataclass(frozen=True)
class GraphMetricConfig:
    damping: float = 0.85
    pagerank_epsilon: float = 1e-10
    pagerank_max_iters: int = 200
    weighting: Weighting = Weighting.UNWEIGHTED

    def __post_init__(self):
        if not 0.0 < self.damping < 1.0:
            raise ValueError("damping must lie in (0, 1)")


@dataclass(frozen=True)
class BipartiteGraph:
    doc_id: str
    sentence_count: int
    entity_nodes: tuple[str, ...]
    edges: tuple[tuple[int, str], ...]  # (sentence index, entity id)


@dataclass(frozen=True)
class ProjectionGraph:
    doc_id: str
    node_count: int
    weighting: Weighting
    edges: dict[tuple[int, int], float]  # keyed (u, v) with u < v, weight > 0

    def neighbors(self) -> dict[int, list[tuple[int, float]]]:
        """Adjacency lists sorted by neighbor index."""
        adjacency: dict[int, list[tuple[int, float]]] = {u: [] for u in range(self.node_count)}
        for (u, v), w in sorted(self.edges.items()):
            adjacency[u].append((v, w))
            adjacency[v].append((u, w))
        for nbrs in adjacency.values():
            nbrs.sort()
        return adjacency

    def edge_lines(self) -> Iterator[str]:
        """Debug export: one ``u v weight`` triple per edge."""
        for (u, v), w in sorted(self.edges.items()):
            yield f"{u} {v} {w:.6f}"


def build_bipartite(grid: EntityGrid) -> BipartiteGraph:
    """Bipartite containment graph of a grid: one edge per grid cell."""
    edges = tuple(sorted(grid.cells.keys()))
    return BipartiteGraph(
        doc_id=grid.doc_id,
        sentence_count=grid.sentence_count,
        entity_nodes=grid.columns,
        edges=edges,
    )


def project(
    bipartite: BipartiteGraph, mode: Weighting = Weighting.UNWEIGHTED
) -> ProjectionGraph:
    """Project the bipartite graph onto sentences.

    Sentences u < v are joined iff they share an entity. Weights:
    Unweighted 1, SharedCount |shared|, DistanceDiscounted
    |shared| / (v - u). No self loops.
    """
    entity_sets: list[set[str]] = [set() for _ in range(bipartite.sentence_count)]
    for sentence, entity in bipartite.edges:
        entity_sets[sentence].add(entity)
    edges: dict[tuple[int, int], float] = {}
    n = bipartite.sentence_count
    for u in range(n):
        if not entity_sets[u]:
            continue
        for v in range(u + 1, n):
            shared = len(entity_sets[u] & entity_sets[v])
            if shared == 0:
                continue
            if mode is Weighting.UNWEIGHTED:
                weight = 1.0
            elif mode is Weighting.SHARED_COUNT:
                weight = float(shared)
            else:
                weight = shared / (v - u)
            edges[(u, v)] = weight
    return ProjectionGraph(
        doc_id=bipartite.doc_id, node_count=n, weighting=mode, edges=edges
    )


# ---------------------------------------------------------------------------
# PageRank (median aggregate)
# ---------------------------------------------------------------------------


def pagerank_update(
    graph: ProjectionGraph, values: list[float], damping: float = 0.85
) -> list[float]:
    """One synchronous step of the PageRank recurrence.

    new(v) = damping * sum_u value(u) * w(u, v) / W(u) + (1 - damping),
    where u runs over v's neighbors and W(u) is u's total incident
    weight. The teleport term is the plain (1 - damping), not divided
    by the node count, and isolated nodes settle at exactly that value.
    """
    adjacency = graph.neighbors()
    incident = {u: math.fsum(w for _, w in nbrs) for u, nbrs in adjacency.items()}
    new = []
    for v in range(graph.node_count):
        flow = math.fsum(
            values[u] * w / incident[u] for u, w in adjacency[v] if incident[u] > 0.0
        )
        new.append(damping * flow + (1.0 - damping))
    return new


def pagerank_vector(
    graph: ProjectionGraph, config: GraphMetricConfig | None = None
) -> list[float]:
    """Iterate the PageRank recurrence from all-ones to convergence."""
    config = config or GraphMetricConfig()
    values = [1.0] * graph.node_count
    for _ in range(config.pagerank_max_iters):
        new = pagerank_update(graph, values, config.damping)
        delta = max((abs(a - b) for a, b in zip(new, values)), default=0.0)
        values = new
        if delta < config.pagerank_epsilon:
            break
    return values


def pagerank_median(
    graph: ProjectionGraph, config: GraphMetricConfig | None = None
) -> CoherenceScore:
    """Median PageRank over sentence nodes; lower means more coherent.

    The median of an even count is the mean of the two middle values.
    """
    if graph.node_count == 0:
        return make_score(PAGERANK, 0.0, defined=False)
    values = sorted(pagerank_vector(graph, config))
    n = len(values)
    if n % 2 == 1:
        median = values[n // 2]
    else:
        median = 0.5 * (values[n // 2 - 1] + values[n // 2])
    return make_score(PAGERANK, median)


# ---------------------------------------------------------------------------
# Clustering coefficient
# ---------------------------------------------------------------------------


def clustering_coefficient(graph: ProjectionGraph) -> CoherenceScore:
    """Mean local clustering over the unweighted skeleton.

    A node's local value is (edges among its neighbors) / (neighbor
    pairs); nodes of degree < 2 contribute 0. Lower means more
    coherent.
    """
    if graph.node_count == 0:
        return make_score(CLUSTERING, 0.0, defined=False)
    neighbor_sets: dict[int, set[int]] = defaultdict(set)
    for (u, v) in graph.edges:
        neighbor_sets[u].add(v)
        neighbor_sets[v].add(u)
    locals_: list[float] = []
    for u in range(graph.node_count):
        nbrs = sorted(neighbor_sets.get(u, ()))
        degree = len(nbrs)
        if degree < 2:
            locals_.append(0.0)
            continue
        closed = sum(
            1
            for i in range(degree)
            for j in range(i + 1, degree)
            if nbrs[j] in neighbor_sets[nbrs[i]]
        )
        locals_.append(closed / (degree * (degree - 1) / 2))
    value = math.fsum(sorted(locals_)) / graph.node_count
    return make_score(CLUSTERING, value)


# ---------------------------------------------------------------------------
# Betweenness (Brandes accumulation over ordered pairs)
# ---------------------------------------------------------------------------


def _shortest_path_dags(
    graph: ProjectionGraph, source: int, adjacency: dict[int, list[tuple[int, float]]]
) -> tuple[list[int], dict[int, list[int]], dict[int, float]]:
    """Settled order, predecessor lists, and path counts from one source.

    Unweighted projections use hop counts (BFS); weighted ones use
    Dijkstra with edge length 1 / weight.
    """
    sigma: dict[int, float] = defaultdict(float)
    sigma[source] = 1.0
    preds: dict[int, list[int]] = defaultdict(list)
    order: list[int] = []
    if graph.weighting is Weighting.UNWEIGHTED:
        dist = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            order.append(u)
            for v, _ in adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        return order, preds, sigma

    dist = {}
    seen = {source: 0.0}
    heap: list[tuple[float, int]] = [(0.0, source)]
    while heap:
        d, u = heappop(heap)
        if u in dist:
            continue
        dist[u] = d
        order.append(u)
        for v, w in adjacency[u]:
            if v in dist:
                continue
            candidate = d + 1.0 / w
            best = seen.get(v)
            if best is None or candidate < best - _LENGTH_TOLERANCE:
                seen[v] = candidate
                heappush(heap, (candidate, v))
                sigma[v] = sigma[u]
                preds[v] = [u]
            elif abs(candidate - best) <= _LENGTH_TOLERANCE:
                sigma[v] += sigma[u]
                preds[v].append(u)
    return order, preds, sigma


def betweenness_values(graph: ProjectionGraph) -> list[float]:
    """Per-node betweenness over ordered (s, t) pairs, endpoints excluded.

    Each node's value is the sum over ordered pairs of the fraction of
    shortest s-t paths passing through it. Disconnected pairs
    contribute nothing.
    """
    adjacency = graph.neighbors()
    centrality = [0.0] * graph.node_count
    for source in range(graph.node_count):
        order, preds, sigma = _shortest_path_dags(graph, source, adjacency)
        dependency: dict[int, float] = defaultdict(float)
        for v in reversed(order):
            for u in preds[v]:
                dependency[u] += sigma[u] / sigma[v] * (1.0 + dependency[v])
            if v != source:
                centrality[v] += dependency[v]
    return centrality


def avg_betweenness(graph: ProjectionGraph) -> CoherenceScore:
    """Average betweenness over nodes; higher means more coherent.

    Shortest paths follow the projection's weighting: hop counts when
    unweighted, else edge length 1 / weight.
    """
    if graph.node_count == 0:
        return make_score(BETWEENNESS, 0.0, defined=False)
    value = math.fsum(sorted(betweenness_values(graph))) / graph.node_count
    return make_score(BETWEENNESS, value)


# ---------------------------------------------------------------------------
# Entity distance
# ---------------------------------------------------------------------------


def entity_distance(doc: AnnotatedDocument) -> CoherenceScore:
    """Inverse mean term distance between repeated entity mentions.

    For every entity occurring in at least two distinct sentences, sum
    the document-offset gaps between its consecutive mentions; divide
    the grand total by the sentence count and invert. Undefined when no
    entity repeats across sentences. Higher means more coherent.
    """
    offsets: dict[str, list[int]] = defaultdict(list)
    sentence_hits: dict[str, set[int]] = defaultdict(set)
    for sentence in doc.sentences:
        for mention in sentence.mentions:
            offsets[mention.entity_id].append(sentence.tokens[mention.token_index].doc_offset)
            sentence_hits[mention.entity_id].add(sentence.index)
    gaps = []
    for entity in sorted(offsets):
        if len(sentence_hits[entity]) < 2:
            continue
        locations = offsets[entity]
        gaps.extend(locations[i + 1] - locations[i] for i in range(len(locations) - 1))
    if not gaps or len(doc.sentences) == 0:
        return make_score(ENTITY_DISTANCE, 0.0, defined=False)
    mean_gap = math.fsum(sorted(gaps)) / len(doc.sentences)
    if mean_gap <= 0.0:
        return make_score(ENTITY_DISTANCE, 0.0, defined=False)
    return make_score(ENTITY_DISTANCE, 1.0 / mean_gap)


# ---------------------------------------------------------------------------
# Topic flow metrics
# ---------------------------------------------------------------------------


def atf(grid: EntityGrid) -> CoherenceScore:
    """Mean reciprocal entity-union size over adjacent sentence pairs.

    Pairs whose union is empty contribute 0; single-sentence documents
    are undefined. Higher means more coherent.
    """
    sets = sentence_entity_sets(grid)
    n = len(sets)
    if n < 2:
        return make_score(ATF, 0.0, defined=False)
    terms = []
    for i in range(n - 1):
        union = len(sets[i] | sets[i + 1])
        terms.append(1.0 / union if union else 0.0)
    return make_score(ATF, math.fsum(sorted(terms)) / (n - 1))


def awtf(grid: EntityGrid) -> CoherenceScore:
    """Mean shared-entity count over adjacent sentence pairs."""
    sets = sentence_entity_sets(grid)
    n = len(sets)
    if n < 2:
        return make_score(AWTF, 0.0, defined=False)
    total = sum(len(sets[i] & sets[i + 1]) for i in range(n - 1))
    return make_score(AWTF, total / (n - 1))


def _shared_entity_count(sets: list[set[str]]) -> int:
    """Number of entities occurring in at least two sentences."""
    seen: set[str] = set()
    repeated: set[str] = set()
    for entities in sets:
        repeated |= entities & seen
        seen |= entities
    return len(repeated)


def natf(grid: EntityGrid) -> CoherenceScore:
    """Topic flow over all sentence pairs, non-adjacent included.

    Sums reciprocal union sizes over every unordered pair i < j and
    divides by the number of entities shared between at least two
    sentences. Undefined (score 0) when no entity is shared.
    """
    sets = sentence_entity_sets(grid)
    shared_entities = _shared_entity_count(sets)
    if shared_entities == 0:
        return make_score(NATF, 0.0, defined=False)
    n = len(sets)
    terms = []
    for i in range(n):
        for j in range(i + 1, n):
            union = len(sets[i] | sets[j])
            if union:
                terms.append(1.0 / union)
    return make_score(NATF, math.fsum(sorted(terms)) / shared_entities)


def nawtf(grid: EntityGrid) -> CoherenceScore:
    """Count of entity-sharing sentence pairs per shared entity.

    When no entity is shared between two sentences the score is a
    defined 0 (explicitly "no coherence", not missing data).
    """
    sets = sentence_entity_sets(grid)
    shared_entities = _shared_entity_count(sets)
    if shared_entities == 0:
        return make_score(NAWTF, 0.0)
    n = len(sets)
    sharing_pairs = sum(
        1 for i in range(n) for j in range(i + 1, n) if sets[i] & sets[j]
    )
    return make_score(NAWTF, sharing_pairs / shared_entities)
