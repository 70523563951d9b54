"""cohkit: document coherence from discourse entities.

Scores documents by the entropy of their entity n-grams and by topology
metrics of their sentence-entity graphs, evaluates models on the
sentence-reordering task, and reranks retrieval runs by interpolating
coherence with retrieval scores.
"""

from .documents import (
    AnnotatedDocument,
    EntityMention,
    InterchangeError,
    Role,
    Sentence,
    Token,
    document_from_dict,
    document_to_dict,
    load_documents,
    normalize_entity,
    renumber_sentences,
    truncate_sentences,
    validate_document,
)
from .entropy import (
    CONDITIONAL,
    NGRAM,
    ZERO_ENTROPY_EPSILON,
    EntropyScore,
    NgramDistribution,
    conditional_entropy,
    coherence_from_sequence,
    entropy_coherence,
    ngram_counts,
    sequence_entropy,
    shannon_entropy,
)
from .estimators import CoherenceScorer
from .graphs import (
    BipartiteGraph,
    GraphMetricConfig,
    ProjectionGraph,
    Weighting,
    atf,
    avg_betweenness,
    awtf,
    betweenness_values,
    build_bipartite,
    clustering_coefficient,
    entity_distance,
    natf,
    nawtf,
    pagerank_median,
    pagerank_update,
    pagerank_vector,
    project,
)
from .grid import EntityGrid, build_grid, entity_sequence, sentence_entity_sets
from .models import ModelScorer, ScoreConfig, resolve_models, score_document, score_models
from .reorder import (
    AccuracyReport,
    PermutationSet,
    evaluate_reordering,
    permute_document,
    sample_permutations,
)
from .rerank import (
    Qrels,
    QrelsFormatError,
    RankedRun,
    RerankConfig,
    RunEntry,
    RunFormatError,
    alpha_sweep,
    err_at,
    evaluate_run,
    mean_average_precision,
    mrr,
    parse_qrels,
    parse_run,
    precision_at,
    rerank,
    write_run,
)
from .scoring import (
    ALL_MODELS,
    CoherenceScore,
    Polarity,
    make_score,
    normalize_collection,
    oriented_value,
)

__version__ = "0.1.0"
