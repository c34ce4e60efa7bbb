"""S-AST construction: subtoken nodes plus data-flow and next-leaf edges."""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from codegraph.errors import EmptyBody
from codegraph.sast.bpe import default_merges, subtokenize
from codegraph.sast.vocab import default_vocabulary


class EdgeKind(IntEnum):
    AstChild = 0
    DataFlow = 1
    NextLeaf = 2
    Subtoken = 3


TREE_EDGES = frozenset({EdgeKind.AstChild, EdgeKind.Subtoken})
EDGE_FEATURE_DIM = 2 * len(EdgeKind)

_DOT_COLORS = {
    EdgeKind.AstChild: "black",
    EdgeKind.DataFlow: "red",
    EdgeKind.NextLeaf: "blue",
    EdgeKind.Subtoken: "darkgreen",
}


@dataclass(frozen=True)
class SAstNode:
    id: int
    vocab_id: int
    label: str
    kind: str
    is_original_leaf: bool = False
    is_subtoken_child: bool = False
    variable_name: str | None = None


@dataclass(frozen=True)
class SAst:
    """S-AST graph.

    ``body`` is the method-body block whose children are the statements used
    for partitioning; ``None`` when the unit has no method.  Original AST
    nodes keep their pre-order ids, so id order over original leaves is
    source order.  Subtoken children are numbered after all AST nodes.
    """

    nodes: tuple
    edges: tuple
    root: int
    body: int | None = None

    def __len__(self):
        return len(self.nodes)

    @property
    def vocab_ids(self):
        return np.array([n.vocab_id for n in self.nodes], dtype=np.int64)

    def edges_of(self, *kinds):
        return [e for e in self.edges if e[2] in kinds]

    def tree_children(self):
        """Children lists of the tree left after dropping DataFlow/NextLeaf edges."""
        children = [[] for _ in self.nodes]
        for src, dst, kind in self.edges:
            if kind in TREE_EDGES:
                children[src].append(dst)
        return children

    def statements(self):
        if self.body is None:
            raise EmptyBody("graph has no method body")
        stmts = [dst for src, dst, k in self.edges if src == self.body and k == EdgeKind.AstChild]
        if not stmts:
            raise EmptyBody("method body has no statements")
        return stmts

    def to_dict(self):
        return {
            "root": self.root,
            "body": self.body,
            "nodes": [
                {
                    "id": n.id,
                    "vocab_id": n.vocab_id,
                    "label": n.label,
                    "kind": n.kind,
                    "is_original_leaf": n.is_original_leaf,
                    "is_subtoken_child": n.is_subtoken_child,
                    "variable_name": n.variable_name,
                }
                for n in self.nodes
            ],
            "edges": [[s, d, EdgeKind(k).name] for s, d, k in self.edges],
        }

    @classmethod
    def from_dict(cls, data):
        nodes = tuple(SAstNode(**n) for n in data["nodes"])
        edges = tuple((s, d, EdgeKind[k]) for s, d, k in data["edges"])
        return cls(nodes, edges, data["root"], data.get("body"))

    def to_dot(self, name="sast"):
        lines = [f"digraph {name} {{", "  node [shape=box, fontname=monospace];"]
        for n in self.nodes:
            shape = ", shape=ellipse" if n.is_original_leaf or n.is_subtoken_child else ""
            label = n.label.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  n{n.id} [label="{label}"{shape}];')
        for s, d, k in self.edges:
            style = "" if k in TREE_EDGES else ", style=dashed, constraint=false"
            lines.append(f'  n{s} -> n{d} [color={_DOT_COLORS[k]}, label="{EdgeKind(k).name}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def variable_occurrences(ast):
    """Map AST leaf id -> variable name, scoped lexically per method.

    Declared names are parameters, local declarators and for-each variables;
    an expression ``Name`` leaf is a variable occurrence when its spelling is
    declared in the same method.
    """
    result = {}
    nodes = ast.nodes
    for method in ast.methods():
        declared = {}
        names = []
        for nid in ast.walk(method):
            node = nodes[nid]
            kind = node.kind.name
            if kind == "VariableDeclarator":
                declared[nodes[node.children[0]].id] = nodes[node.children[0]].token
            elif kind == "FormalParameter":
                declared[node.children[-1]] = nodes[node.children[-1]].token
            elif kind == "Name":
                names.append(nid)
        spellings = set(declared.values())
        result.update(declared)
        result.update({nid: nodes[nid].token for nid in names if nodes[nid].token in spellings})
    return result


def build_sast(ast, vocab=None, merges=None):
    """Build the S-AST of ``ast``."""
    vocab = vocab if vocab is not None else default_vocabulary()
    merges = merges if merges is not None else default_merges()
    variables = variable_occurrences(ast)
    n_ast = len(ast.nodes)
    nodes = [None] * n_ast
    edges = []
    extra = []
    subtoken_edges = []
    for node in ast.nodes:
        if node.is_leaf:
            pieces = subtokenize(node.token, merges) or [node.token]
            nodes[node.id] = SAstNode(
                node.id,
                vocab.subword_id(pieces[0]),
                pieces[0],
                node.kind.name,
                is_original_leaf=True,
                variable_name=variables.get(node.id),
            )
            for piece in pieces[1:]:
                child = n_ast + len(extra)
                extra.append(SAstNode(child, vocab.subword_id(piece), piece, "Subtoken", is_subtoken_child=True))
                subtoken_edges.append((node.id, child, EdgeKind.Subtoken))
        else:
            nodes[node.id] = SAstNode(node.id, vocab.kind_id(node.kind.name), node.kind.name, node.kind.name)
    for nid in ast.walk():
        for c in ast.nodes[nid].children:
            edges.append((nid, c, EdgeKind.AstChild))
    edges.extend(subtoken_edges)
    leaves = ast.leaves()
    edges.extend((a, b, EdgeKind.NextLeaf) for a, b in zip(leaves, leaves[1:]))
    chains = {}
    for nid in leaves:
        name = variables.get(nid)
        if name is not None:
            chains.setdefault(_scope_key(ast, nid, name), []).append(nid)
    for occ in chains.values():
        edges.extend((a, b, EdgeKind.DataFlow) for a, b in zip(occ, occ[1:]))
    methods = ast.methods()
    body = ast.method_body() if methods else None
    return SAst(tuple(nodes + extra), tuple(edges), ast.root, body)


def _scope_key(ast, nid, name):
    # Methods occupy contiguous pre-order id ranges; find the enclosing one.
    owner = None
    for m in ast.methods():
        if m <= nid:
            owner = m
    return (owner, name)
