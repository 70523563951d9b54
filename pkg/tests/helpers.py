"""Independent oracles and synthetic corpus builders for the test suite.

The oracles deliberately avoid the library's code paths: entropy is
recomputed from explicit window enumeration, betweenness from
exhaustive simple-path enumeration with exact rational lengths, and the
topic-flow metrics from raw mention lists instead of the grid.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from fractions import Fraction

from cohkit import AnnotatedDocument, document_from_dict
from cohkit.graphs import ProjectionGraph

# ---------------------------------------------------------------------------
# Entropy oracles
# ---------------------------------------------------------------------------


def oracle_ngram_entropy(sequence, n):
    """Window enumeration plus direct -sum p log2 p. None if no window."""
    windows = [tuple(sequence[i : i + n]) for i in range(len(sequence) - n + 1)]
    if not windows:
        return None
    counts = Counter(windows)
    total = len(windows)
    return -sum((c / total) * math.log2(c / total) for c in counts.values())


def oracle_conditional_entropy(sequence, k):
    """Direct double sum over followers and their preceding k-grams."""
    windows = [tuple(sequence[i : i + k + 1]) for i in range(len(sequence) - k)]
    if not windows:
        return None
    window_counts = Counter(windows)
    follower_counts = Counter(w[-1] for w in windows)
    unigrams = Counter(sequence)
    total = len(sequence)
    value = 0.0
    for follower in set(sequence):
        if follower_counts[follower] == 0:
            continue
        inner = 0.0
        for window, count in window_counts.items():
            if window[-1] != follower:
                continue
            p = count / follower_counts[follower]
            inner += p * math.log2(p)
        value -= (unigrams[follower] / total) * inner
    return value


# ---------------------------------------------------------------------------
# Graph oracles
# ---------------------------------------------------------------------------


def _edge_lengths(graph: ProjectionGraph):
    lengths = {}
    for (u, v), w in graph.edges.items():
        if graph.weighting.value == "unweighted":
            length = Fraction(1)
        else:
            length = Fraction(1) / Fraction(w).limit_denominator(10**6)
        lengths[(u, v)] = length
        lengths[(v, u)] = length
    return lengths


def oracle_betweenness_total(graph: ProjectionGraph):
    """Average betweenness via exhaustive simple-path enumeration.

    Exact rational arithmetic; intended for graphs of at most ~8 nodes.
    """
    n = graph.node_count
    if n == 0:
        return None
    lengths = _edge_lengths(graph)
    adjacency = {u: [] for u in range(n)}
    for (u, v) in graph.edges:
        adjacency[u].append(v)
        adjacency[v].append(u)

    def all_paths(source, target):
        paths = []

        def walk(node, visited, length):
            if node == target:
                paths.append((length, tuple(visited)))
                return
            for nxt in adjacency[node]:
                if nxt not in visited:
                    walk(nxt, visited + [nxt], length + lengths[(node, nxt)])

        walk(source, [source], Fraction(0))
        return paths

    centrality = [Fraction(0)] * n
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            paths = all_paths(s, t)
            if not paths:
                continue
            best = min(length for length, _ in paths)
            shortest = [nodes for length, nodes in paths if length == best]
            for u in range(n):
                if u in (s, t):
                    continue
                through = sum(1 for nodes in shortest if u in nodes)
                centrality[u] += Fraction(through, len(shortest))
    return [float(c) for c in centrality], float(sum(centrality) / n)


def oracle_clustering(graph: ProjectionGraph):
    """Triple-loop global clustering coefficient."""
    n = graph.node_count
    if n == 0:
        return None
    adj = [[False] * n for _ in range(n)]
    for (u, v) in graph.edges:
        adj[u][v] = adj[v][u] = True
    total = Fraction(0)
    for u in range(n):
        neighbors = [v for v in range(n) if adj[u][v]]
        if len(neighbors) < 2:
            continue
        closed = open_ = 0
        for i in range(len(neighbors)):
            for j in range(i + 1, len(neighbors)):
                if adj[neighbors[i]][neighbors[j]]:
                    closed += 1
                else:
                    open_ += 1
        total += Fraction(closed, closed + open_)
    return float(total / n)


# ---------------------------------------------------------------------------
# Topic-flow and distance oracles (straight from mention lists)
# ---------------------------------------------------------------------------


def mention_sets(doc: AnnotatedDocument):
    return [{m.entity_id for m in s.mentions} for s in doc.sentences]


def oracle_atf(doc: AnnotatedDocument):
    sets = mention_sets(doc)
    if len(sets) < 2:
        return None
    total = Fraction(0)
    for i in range(len(sets) - 1):
        union = len(sets[i] | sets[i + 1])
        if union:
            total += Fraction(1, union)
    return float(total / (len(sets) - 1))


def oracle_awtf(doc: AnnotatedDocument):
    sets = mention_sets(doc)
    if len(sets) < 2:
        return None
    return sum(len(sets[i] & sets[i + 1]) for i in range(len(sets) - 1)) / (len(sets) - 1)


def oracle_shared_entities(doc: AnnotatedDocument):
    sets = mention_sets(doc)
    entities = set().union(*sets) if sets else set()
    return {e for e in entities if sum(1 for s in sets if e in s) >= 2}


def oracle_natf(doc: AnnotatedDocument):
    shared = oracle_shared_entities(doc)
    if not shared:
        return None
    sets = mention_sets(doc)
    total = Fraction(0)
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            union = len(sets[i] | sets[j])
            if union:
                total += Fraction(1, union)
    return float(total / len(shared))


def oracle_nawtf(doc: AnnotatedDocument):
    shared = oracle_shared_entities(doc)
    if not shared:
        return 0.0
    sets = mention_sets(doc)
    pairs = sum(
        1
        for i in range(len(sets))
        for j in range(i + 1, len(sets))
        if sets[i] & sets[j]
    )
    return pairs / len(shared)


def oracle_entity_distance(doc: AnnotatedDocument):
    by_entity: dict[str, list[int]] = {}
    sentences_of: dict[str, set[int]] = {}
    for sentence in doc.sentences:
        for mention in sentence.mentions:
            offset = sentence.tokens[mention.token_index].doc_offset
            by_entity.setdefault(mention.entity_id, []).append(offset)
            sentences_of.setdefault(mention.entity_id, set()).add(sentence.index)
    total = 0
    any_eligible = False
    for entity, offsets in by_entity.items():
        if len(sentences_of[entity]) < 2:
            continue
        any_eligible = True
        for a, b in zip(offsets, offsets[1:]):
            total += b - a
    if not any_eligible or total == 0:
        return None
    return len(doc.sentences) / total


# ---------------------------------------------------------------------------
# Synthetic corpora
# ---------------------------------------------------------------------------


def random_document(doc_id, rng: random.Random, n_sentences=None, entity_pool=6,
                    min_len=3, max_len=9, min_mentions=0):
    """Random annotated document with a shared entity vocabulary."""
    n_sentences = n_sentences or rng.randint(3, 7)
    entities = [f"e{i}" for i in range(entity_pool)]
    sentences = []
    for _ in range(n_sentences):
        length = rng.randint(min_len, max_len)
        tokens = [f"t{rng.randrange(100)}" for _ in range(length)]
        n_mentions = rng.randint(min(min_mentions, length), min(3, length))
        positions = rng.sample(range(length), n_mentions)
        mentions = [
            {
                "entity": rng.choice(entities),
                "role": rng.choice(["s", "o"]),
                "token_index": pos,
            }
            for pos in sorted(positions)
        ]
        sentences.append({"tokens": tokens, "mentions": mentions})
    return document_from_dict({"doc_id": doc_id, "sentences": sentences})


def chain_document(doc_id, n_sentences, length=7, theme=True):
    """Chain document: consecutive sentences share exactly one link entity.

    The link sits on the last token of one sentence and the first token
    of the next, so the original order minimizes every mention gap.
    With ``theme`` a document-wide entity joins every sentence, which
    makes the sentence projection a weight-sensitive complete graph;
    without it, adjacent sentences share one entity and non-adjacent
    ones share none. Boundary sentences carry singleton entities so all
    sentences hold the same number of entities.
    """
    if n_sentences < 2 or length < 3:
        raise ValueError("need at least 2 sentences of 3 tokens")
    sentences = []
    for i in range(n_sentences):
        tokens = [f"w{i}x{j}" for j in range(length)]
        mentions = []
        if i > 0:
            entity = f"link{i}"
        else:
            entity = f"head-{doc_id}"
        tokens[0] = entity
        mentions.append({"entity": entity, "role": "s", "token_index": 0})
        if theme:
            mid = length // 2
            tokens[mid] = "theme"
            mentions.append({"entity": f"theme-{doc_id}", "role": "o", "token_index": mid})
        if i < n_sentences - 1:
            entity = f"link{i + 1}"
        else:
            entity = f"tail-{doc_id}"
        tokens[-1] = entity
        mentions.append({"entity": entity, "role": "o", "token_index": length - 1})
        sentences.append({"tokens": tokens, "mentions": mentions})
    return document_from_dict({"doc_id": doc_id, "sentences": sentences})


def chain_corpus(n_docs, seed=7, theme=True, min_sentences=5, max_sentences=8):
    rng = random.Random(seed)
    return [
        chain_document(f"chain-{i:03d}", rng.randint(min_sentences, max_sentences), theme=theme)
        for i in range(n_docs)
    ]


def repetitive_document(doc_id, entity="domains", n_sentences=3):
    """Spam-like document: the same entity over and over (zero entropy)."""
    sentences = [
        {
            "tokens": ["free", entity, ","],
            "mentions": [{"entity": entity, "role": "o", "token_index": 1}],
        }
        for _ in range(n_sentences)
    ]
    return document_from_dict({"doc_id": doc_id, "sentences": sentences})


def scattered_document(doc_id, n_sentences=4, entities_per_sentence=3, salt=""):
    """Every sentence introduces brand-new entities (maximal entropy)."""
    sentences = []
    counter = 0
    for _ in range(n_sentences):
        tokens = []
        mentions = []
        for _ in range(entities_per_sentence):
            entity = f"new{salt}-{doc_id}-{counter}"
            counter += 1
            mentions.append({"entity": entity, "role": "s", "token_index": len(tokens)})
            tokens.append(entity)
        tokens.append(".")
        sentences.append({"tokens": tokens, "mentions": mentions})
    return document_from_dict({"doc_id": doc_id, "sentences": sentences})
