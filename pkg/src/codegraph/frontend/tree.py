"""AST containers and traversal helpers."""

from dataclasses import dataclass, field
from pathlib import Path

from codegraph.errors import EmptyBody
from codegraph.frontend.grammar import KIND_BY_NAME, NodeKind

JAVA_SUBSET = "JavaSubset"


@dataclass(frozen=True)
class SourceUnit:
    path: str
    text: str
    language: str = JAVA_SUBSET

    @classmethod
    def from_text(cls, text, path="<memory>"):
        return cls(path=path, text=text)

    @classmethod
    def from_file(cls, path):
        return cls(path=str(path), text=Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class AstNode:
    id: int
    kind: NodeKind
    token: str | None
    children: tuple
    span: tuple

    @property
    def is_leaf(self):
        return self.token is not None


@dataclass(frozen=True)
class Ast:
    """Arena-allocated tree.  Node ids are assigned in pre-order, root is 0."""

    root: int
    nodes: tuple
    unit: SourceUnit = field(repr=False, compare=False)

    def __len__(self):
        return len(self.nodes)

    def __getitem__(self, node_id):
        return self.nodes[node_id]

    def parents(self):
        parent = [None] * len(self.nodes)
        for node in self.nodes:
            for c in node.children:
                parent[c] = node.id
        return parent

    def walk(self, start=None):
        """Yield node ids in depth-first pre-order."""
        stack = [self.root if start is None else start]
        while stack:
            nid = stack.pop()
            yield nid
            stack.extend(reversed(self.nodes[nid].children))

    def leaves(self):
        return [nid for nid in self.walk() if self.nodes[nid].is_leaf]

    def find(self, kind_name):
        return [n.id for n in self.nodes if n.kind.name == kind_name]

    def methods(self):
        return self.find("MethodDeclaration")

    def method_body(self, method=None):
        """Id of the body block of ``method`` (default: the first method)."""
        methods = self.methods()
        if method is None:
            if not methods:
                raise EmptyBody("no method declaration in unit")
            method = methods[0]
        return self.nodes[method].children[-1]

    def subtree(self, node_id):
        """Return the subtree rooted at ``node_id`` as a fresh, renumbered Ast."""
        order = list(self.walk(node_id))
        remap = {old: new for new, old in enumerate(order)}
        nodes = tuple(
            AstNode(
                remap[old],
                self.nodes[old].kind,
                self.nodes[old].token,
                tuple(remap[c] for c in self.nodes[old].children),
                self.nodes[old].span,
            )
            for old in order
        )
        return Ast(0, nodes, self.unit)

    def to_dict(self):
        return {
            "root": self.root,
            "path": self.unit.path,
            "nodes": [
                {
                    "id": n.id,
                    "kind": n.kind.name,
                    "token": n.token,
                    "children": list(n.children),
                    "span": list(n.span),
                }
                for n in self.nodes
            ],
        }

    @classmethod
    def from_dict(cls, data, unit=None):
        nodes = tuple(
            AstNode(
                d["id"],
                KIND_BY_NAME[d["kind"]],
                d["token"],
                tuple(d["children"]),
                tuple(d["span"]),
            )
            for d in data["nodes"]
        )
        if unit is None:
            unit = SourceUnit(data.get("path", "<memory>"), "")
        return cls(data["root"], nodes, unit)


def preorder_tokens(ast):
    """Kind name for structural nodes, token text for leaves, in pre-order."""
    out = []
    for nid in ast.walk():
        node = ast.nodes[nid]
        out.append(node.token if node.is_leaf else node.kind.name)
    return out


def statement_subtrees(ast, method=None):
    """Ids of the top-level statements of the method body, in source order."""
    body = ast.method_body(method)
    children = list(ast.nodes[body].children)
    if not children:
        raise EmptyBody("method body has no statements")
    return children


def split_methods(ast):
    """One Ast per method declaration, each rooted at its MethodDeclaration."""
    return [ast.subtree(m) for m in ast.methods()]
