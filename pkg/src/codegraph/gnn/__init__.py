"""Desk-scale PGNN: GGNN over subgraphs and the whole S-AST, LSTM, skip fusion."""

from codegraph.gnn.backward import finite_diff_check, gradient_check, loss_and_grads
from codegraph.gnn.kernel import (
    Embedding,
    EmbeddingKind,
    GraphInput,
    ggnn_forward,
    graph_input,
    lstm_forward,
    pgnn_embed,
    pgnn_forward,
)
from codegraph.gnn.params import PgnnConfig, PgnnParams, load_checkpoint, save_checkpoint

__all__ = [
    "Embedding",
    "EmbeddingKind",
    "GraphInput",
    "PgnnConfig",
    "PgnnParams",
    "finite_diff_check",
    "ggnn_forward",
    "gradient_check",
    "graph_input",
    "load_checkpoint",
    "loss_and_grads",
    "lstm_forward",
    "pgnn_embed",
    "pgnn_forward",
    "save_checkpoint",
]
