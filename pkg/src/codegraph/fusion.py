"""Fusion of graph and text embeddings, and siamese clone scoring."""

import math
from dataclasses import dataclass

import numpy as np

from codegraph.ek import MAX_LENGTH, ApiStore, ReferenceEncoder, transform
from codegraph.errors import EmptyBody, ParseError, ShapeMismatch
from codegraph.frontend import SourceUnit, parse, split_methods
from codegraph.gnn.kernel import Embedding, EmbeddingKind, pgnn_forward
from codegraph.gnn.params import PgnnConfig, PgnnParams
from codegraph.partition import PartitionConfig, partition
from codegraph.sast import build_sast, default_merges, default_vocabulary


@dataclass(frozen=True)
class FusionParams:
    w: np.ndarray  # (2d, d)
    b: np.ndarray  # (d,)

    @property
    def d(self):
        return self.b.shape[0]

    @classmethod
    def init(cls, d, seed=0):
        rng = np.random.default_rng([seed, 1])
        bound = 1.0 / np.sqrt(2 * d)
        return cls(rng.uniform(-bound, bound, (2 * d, d)), rng.uniform(-bound, bound, d))

    def tensors(self):
        return {"fc_f.w": self.w, "fc_f.b": self.b}

    @classmethod
    def from_tensors(cls, tensors):
        return cls(np.asarray(tensors["fc_f.w"], float), np.asarray(tensors["fc_f.b"], float))


def fuse(ep, ee, params):
    """E_f = fc_f([E_p ; E_e])."""
    ep_v = ep.v if isinstance(ep, Embedding) else np.asarray(ep, float)
    ee_v = ee.v if isinstance(ee, Embedding) else np.asarray(ee, float)
    d = params.d
    if ep_v.shape != (d,) or ee_v.shape != (d,) or params.w.shape != (2 * d, d):
        raise ShapeMismatch(
            f"fuse expects two width-{d} vectors, got {ep_v.shape} and {ee_v.shape}"
        )
    return Embedding(np.concatenate([ep_v, ee_v]) @ params.w + params.b, EmbeddingKind.Ef)


def cosine(a, b):
    """Cosine similarity, defined as 0 when either vector is zero."""
    aa = float(a @ a)
    bb = float(b @ b)
    if aa == 0.0 or bb == 0.0:
        return 0.0
    # sqrt(aa * aa) == aa exactly, so a vector scores exactly 1 with itself.
    return max(-1.0, min(1.0, float(a @ b) / math.sqrt(aa * bb)))


@dataclass(frozen=True)
class CloneScore:
    value: float
    threshold: float = 0.5

    @property
    def label(self):
        return self.value >= self.threshold

    def to_dict(self):
        return {"value": self.value, "threshold": self.threshold, "label": self.label}


def first_method(unit):
    """Parse ``unit`` and return the Ast of its first method."""
    if isinstance(unit, str):
        unit = SourceUnit.from_text(unit)
    methods = split_methods(parse(unit))
    if not methods:
        raise EmptyBody(f"{unit.path}: no method declaration")
    return methods[0]


@dataclass(frozen=True)
class PipelineConfig:
    lambda_: int = 30
    max_length: int = MAX_LENGTH["clone"]
    threshold: float = 0.5
    use_external_knowledge: bool = True


class Pipeline:
    """Parameters and resources shared by every input the pipeline encodes.

    Siamese scoring runs both codes through the same instance, so the two
    branches read the same tensors.
    """

    def __init__(self, pgnn, fusion, store=None, encoder=None, vocab=None, merges=None, config=None):
        self.pgnn = pgnn
        self.fusion = fusion
        self.store = store if store is not None else ApiStore()
        self.encoder = encoder if encoder is not None else ReferenceEncoder(pgnn.d)
        self.vocab = vocab if vocab is not None else default_vocabulary()
        self.merges = merges if merges is not None else default_merges()
        self.config = config if config is not None else PipelineConfig()
        if fusion.d != pgnn.d:
            raise ShapeMismatch(f"fusion width {fusion.d} != PGNN width {pgnn.d}")

    @classmethod
    def init(cls, d=32, seed=0, **kwargs):
        vocab = kwargs.pop("vocab", None) or default_vocabulary()
        pgnn = PgnnParams.init(PgnnConfig(vocab.size, d=d), seed)
        return cls(pgnn, FusionParams.init(d, seed), vocab=vocab, **kwargs)

    def method_ast(self, unit):
        return first_method(unit)

    def encode_ast(self, ast):
        """All intermediate embeddings for one method Ast."""
        sast = build_sast(ast, self.vocab, self.merges)
        parts = partition(sast, PartitionConfig(self.config.lambda_))
        ep = Embedding(pgnn_forward(sast, parts, self.pgnn), EmbeddingKind.Ep)
        store = self.store if self.config.use_external_knowledge else ApiStore()
        ctx = transform(ast, store)
        ee = np.asarray(self.encoder.encode(ctx.truncated(self.config.max_length)), float)
        ef = fuse(ep, ee, self.fusion)
        return {"sast": sast, "partition": parts, "context": ctx, "ep": ep, "ee": ee, "ef": ef}

    def embed(self, unit):
        return self.encode_ast(self.method_ast(unit))["ef"]


def clone_score(code_a, code_b, pipeline, config=None):
    """Siamese similarity ``(cos(E_f^A, E_f^B) + 1) / 2`` with shared parameters."""
    threshold = (config or pipeline.config).threshold
    embs = []
    for side, code in (("A", code_a), ("B", code_b)):
        try:
            embs.append(pipeline.embed(code).v)
        except ParseError as exc:
            raise ParseError(exc.line, exc.column, exc.expected, exc.found, side=side) from None
    value = (cosine(embs[0], embs[1]) + 1.0) / 2.0
    return CloneScore(min(1.0, max(0.0, value)), threshold)
