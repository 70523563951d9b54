"""Scikit-learn compatible front end for the coherence scorers.

CoherenceScorer behaves like a text vectorizer: fit() learns the
per-model collection maxima used for normalization, transform() emits a
(documents x models) matrix of normalized scores in [0, 1]. It accepts
AnnotatedDocument instances or raw interchange dicts, so it slots into
sklearn pipelines next to ordinary feature extractors.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .documents import (
    AnnotatedDocument,
    document_from_dict,
    truncate_sentences,
    validate_document,
)
from .graphs import Weighting
from .models import ScoreConfig, resolve_models, score_models


class CoherenceScorer(BaseEstimator, TransformerMixin):
    """Turn annotated documents into a matrix of coherence features.

    Parameters
    ----------
    models : "all", a model name, or a list of names ("entropy" uses
        ``order``); one output column per resolved model.
    order : entropy model order (0, 1 or 2).
    entropy_mode : "ngram" or "conditional".
    weighting : projection weighting, "unweighted", "shared" or "distance".
    damping : PageRank damping factor.
    max_terms : cut sentences to this many tokens before scoring
        (None keeps them whole).

    fit() records the maximum defined raw score per model over the
    collection; transform() divides by those maxima, mapping undefined
    scores to 0. Values can exceed 1 for documents outside the fitted
    collection that score above its maximum.
    """

    def __init__(
        self,
        models="all",
        order=0,
        entropy_mode="ngram",
        weighting="unweighted",
        damping=0.85,
        max_terms=None,
    ):
        self.models = models
        self.order = order
        self.entropy_mode = entropy_mode
        self.weighting = weighting
        self.damping = damping
        self.max_terms = max_terms

    def _config(self) -> ScoreConfig:
        return ScoreConfig(
            order=self.order,
            entropy_mode=self.entropy_mode,
            weighting=Weighting(self.weighting),
            damping=self.damping,
        )

    def _model_ids(self) -> list[str]:
        requested = [self.models] if isinstance(self.models, str) else list(self.models)
        return resolve_models(requested, order=self.order)

    def _coerce(self, X) -> list[AnnotatedDocument]:
        docs = []
        for item in X:
            if isinstance(item, AnnotatedDocument):
                doc = validate_document(item)
            elif isinstance(item, dict):
                doc = document_from_dict(item)
            else:
                raise TypeError(
                    "expected AnnotatedDocument or interchange dict, "
                    f"got {type(item).__name__}"
                )
            if self.max_terms is not None:
                doc = truncate_sentences(doc, self.max_terms)
            docs.append(doc)
        return docs

    def _raw_matrix(self, docs: list[AnnotatedDocument], model_ids: list[str]) -> np.ndarray:
        config = self._config()
        matrix = np.zeros((len(docs), len(model_ids)))
        defined = np.zeros_like(matrix, dtype=bool)
        for i, doc in enumerate(docs):
            scores = score_models(doc, model_ids, config)
            for j, model_id in enumerate(model_ids):
                score = scores[model_id]
                matrix[i, j] = score.raw
                defined[i, j] = score.defined
        matrix[~defined] = 0.0
        self._last_defined = defined
        return matrix

    def fit(self, X, y=None):
        docs = self._coerce(X)
        model_ids = self._model_ids()
        matrix = self._raw_matrix(docs, model_ids)
        defined = self._last_defined
        maxima = np.zeros(len(model_ids))
        for j in range(len(model_ids)):
            column = matrix[defined[:, j], j]
            maxima[j] = column.max() if column.size else 0.0
        self.model_ids_ = model_ids
        self.max_raw_ = maxima
        self.n_features_in_ = 1
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "max_raw_"):
            raise NotFittedError("CoherenceScorer must be fitted before transform")
        docs = self._coerce(X)
        matrix = self._raw_matrix(docs, self.model_ids_)
        scale = np.where(self.max_raw_ > 0.0, self.max_raw_, 1.0)
        matrix = matrix / scale
        matrix[:, self.max_raw_ <= 0.0] = 0.0
        return matrix

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        if not hasattr(self, "model_ids_"):
            raise NotFittedError("CoherenceScorer must be fitted first")
        return np.asarray(self.model_ids_, dtype=object)
