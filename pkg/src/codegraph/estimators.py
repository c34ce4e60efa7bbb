"""scikit-learn style estimators over the function-level API.

``X`` is a sequence of Java-subset sources (str or SourceUnit); each input
contributes its first method.  Pair estimators take a sequence of
``(source_a, source_b)`` tuples.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin, clone
from sklearn.utils.validation import check_is_fitted

from codegraph.ek import ReferenceEncoder, default_api_pairs_path, load_api_pairs
from codegraph.frontend import SourceUnit
from codegraph.fusion import FusionParams, Pipeline, PipelineConfig, cosine, first_method
from codegraph.gnn.params import PgnnConfig, PgnnParams
from codegraph.partition import recommend_lambda
from codegraph.sast import build_sast, default_merges, default_vocabulary


def check_sources(X):
    """Validate ``X`` as a non-empty sequence of sources; returns a list."""
    if isinstance(X, (str, bytes, SourceUnit)):
        raise TypeError("X must be a sequence of sources, not a single source")
    try:
        items = list(X)
    except TypeError:
        raise TypeError(f"X must be iterable, got {type(X).__name__}") from None
    if not items:
        raise ValueError("X is empty")
    for i, item in enumerate(items):
        if not isinstance(item, (str, SourceUnit)):
            raise TypeError(f"X[{i}] must be str or SourceUnit, got {type(item).__name__}")
    return items


def check_pairs(X):
    """Validate ``X`` as a non-empty sequence of source pairs."""
    try:
        items = [tuple(p) for p in X]
    except TypeError:
        raise TypeError("X must be a sequence of (source_a, source_b) pairs") from None
    if not items:
        raise ValueError("X is empty")
    for i, p in enumerate(items):
        if len(p) != 2:
            raise ValueError(f"X[{i}] has {len(p)} elements, expected 2")
    check_sources([s for p in items for s in p])
    return items


class SASTBuilder(TransformerMixin, BaseEstimator):
    """Stateless transformer from sources to S-ASTs."""

    def fit(self, X, y=None):
        check_sources(X)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self)
        vocab, merges = default_vocabulary(), default_merges()
        return [build_sast(first_method(x), vocab, merges) for x in check_sources(X)]


class PGNNEmbedder(TransformerMixin, BaseEstimator):
    """Fused code embeddings E_f, one row per input.

    ``lambda_="auto"`` picks the subgraph threshold from the average S-AST
    size of the training sources.  Parameters are randomly initialised from
    ``seed``; there is no training step.
    """

    def __init__(self, lambda_="auto", dims=32, seed=0, api_pairs=None,
                 use_external_knowledge=True, max_length=400):
        self.lambda_ = lambda_
        self.dims = dims
        self.seed = seed
        self.api_pairs = api_pairs
        self.use_external_knowledge = use_external_knowledge
        self.max_length = max_length

    def _validate_params(self):
        if not (isinstance(self.dims, (int, np.integer)) and self.dims >= 2):
            raise ValueError(f"dims must be an integer >= 2, got {self.dims!r}")
        if self.lambda_ != "auto" and not (isinstance(self.lambda_, (int, np.integer)) and self.lambda_ >= 1):
            raise ValueError(f"lambda_ must be 'auto' or an integer >= 1, got {self.lambda_!r}")
        if not (isinstance(self.max_length, (int, np.integer)) and self.max_length >= 1):
            raise ValueError(f"max_length must be an integer >= 1, got {self.max_length!r}")

    def fit(self, X, y=None):
        self._validate_params()
        sources = check_sources(X)
        vocab, merges = default_vocabulary(), default_merges()
        store = load_api_pairs(self.api_pairs or default_api_pairs_path())
        if self.lambda_ == "auto":
            sizes = [len(build_sast(first_method(s), vocab, merges)) for s in sources]
            self.avg_sast_nodes_ = float(np.mean(sizes))
            self.lambda_used_ = recommend_lambda(self.avg_sast_nodes_)
        else:
            self.lambda_used_ = int(self.lambda_)
        self.params_ = PgnnParams.init(PgnnConfig(vocab.size, d=self.dims), self.seed)
        self.fusion_ = FusionParams.init(self.dims, self.seed)
        self.pipeline_ = Pipeline(
            self.params_,
            self.fusion_,
            store=store,
            encoder=ReferenceEncoder(self.dims),
            vocab=vocab,
            merges=merges,
            config=PipelineConfig(
                lambda_=self.lambda_used_,
                max_length=self.max_length,
                use_external_knowledge=self.use_external_knowledge,
            ),
        )
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "pipeline_")
        return np.stack([self.pipeline_.embed(s).v for s in check_sources(X)])


class SiameseCloneDetector(ClassifierMixin, BaseEstimator):
    """Clone classifier over source pairs with one shared embedder.

    The score of a pair is ``(cos + 1) / 2`` of the two embeddings; pairs
    at or above ``threshold`` are labelled 1.
    """

    def __init__(self, embedder=None, threshold=0.5):
        self.embedder = embedder
        self.threshold = threshold

    def fit(self, X, y=None):
        pairs = check_pairs(X)
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold!r}")
        if y is not None and len(y) != len(pairs):
            raise ValueError(f"X has {len(pairs)} pairs but y has {len(y)} labels")
        embedder = clone(self.embedder) if self.embedder is not None else PGNNEmbedder()
        self.embedder_ = embedder.fit([s for p in pairs for s in p])
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = 2
        return self

    def decision_function(self, X):
        """Similarity scores in [0, 1]."""
        check_is_fitted(self, "embedder_")
        pairs = check_pairs(X)
        emb = self.embedder_.transform([s for p in pairs for s in p])
        scores = [(cosine(emb[2 * i], emb[2 * i + 1]) + 1.0) / 2.0 for i in range(len(pairs))]
        return np.clip(np.array(scores), 0.0, 1.0)

    def predict_proba(self, X):
        s = self.decision_function(X)
        return np.column_stack([1.0 - s, s])

    def predict(self, X):
        return (self.decision_function(X) >= self.threshold).astype(int)
