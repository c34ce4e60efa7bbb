"""Java-subset front end: lexer, parser and AST utilities."""

from codegraph.frontend.grammar import KINDS, NON_LEAF_KINDS, NodeKind
from codegraph.frontend.parser import parse
from codegraph.frontend.tree import (
    Ast,
    AstNode,
    SourceUnit,
    preorder_tokens,
    split_methods,
    statement_subtrees,
)

__all__ = [
    "Ast",
    "AstNode",
    "KINDS",
    "NON_LEAF_KINDS",
    "NodeKind",
    "SourceUnit",
    "parse",
    "preorder_tokens",
    "split_methods",
    "statement_subtrees",
]
