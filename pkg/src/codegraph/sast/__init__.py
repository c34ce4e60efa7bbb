"""S-AST: subtokenised AST with data-flow and next-leaf edges."""

from codegraph.sast.bpe import MergeTable, default_merges, subtokenize
from codegraph.sast.graph import EDGE_FEATURE_DIM, EdgeKind, SAst, SAstNode, build_sast
from codegraph.sast.vocab import Vocabulary, build_vocabulary, default_vocabulary

__all__ = [
    "EDGE_FEATURE_DIM",
    "EdgeKind",
    "MergeTable",
    "SAst",
    "SAstNode",
    "Vocabulary",
    "build_sast",
    "build_vocabulary",
    "default_merges",
    "default_vocabulary",
    "subtokenize",
]
