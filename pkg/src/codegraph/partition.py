"""Statement-level partitioning of an S-AST into ordered subgraphs.

Statements under the method body are accumulated left to right until their
subtree node count reaches ``lambda_``; each closed group becomes one
subgraph.  Later subgraphs import the most recent earlier occurrence of each
variable they use, and a short trailing subgraph is folded into its
predecessor.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from codegraph.sast.graph import EdgeKind, TREE_EDGES

LAMBDA_MIN = 10
LAMBDA_MAX = 190


def recommend_lambda(avg_nodes):
    """Subgraph threshold of roughly a fifth to a quarter of the mean S-AST size."""
    if avg_nodes <= 0:
        raise ValueError("average node count must be positive")
    value = math.floor(avg_nodes / 4.5 + 0.5)
    return max(LAMBDA_MIN, min(LAMBDA_MAX, value))


@dataclass(frozen=True)
class PartitionConfig:
    lambda_: int = 30

    def __post_init__(self):
        if int(self.lambda_) != self.lambda_ or self.lambda_ < 1:
            raise ValueError(f"lambda must be a positive integer, got {self.lambda_!r}")

    @classmethod
    def recommended(cls, avg_nodes):
        return cls(recommend_lambda(avg_nodes))


@dataclass(frozen=True)
class Subgraph:
    node_ids: tuple
    edges: tuple
    order_index: int
    carried_nodes: frozenset = frozenset()
    statements: tuple = ()
    vocab_ids: tuple = field(default=(), repr=False)

    def __len__(self):
        return len(self.node_ids)

    @property
    def native_nodes(self):
        return tuple(n for n in self.node_ids if n not in self.carried_nodes)

    def to_dict(self):
        return {
            "order_index": self.order_index,
            "statements": list(self.statements),
            "native_nodes": list(self.native_nodes),
            "carried_nodes": sorted(self.carried_nodes),
            "edges": [[s, d, EdgeKind(k).name] for s, d, k in self.edges],
        }


@dataclass(frozen=True)
class PartitionResult:
    subgraphs: tuple
    lambda_used: int

    def __len__(self):
        return len(self.subgraphs)

    def __iter__(self):
        return iter(self.subgraphs)

    def to_dict(self):
        return {"lambda": self.lambda_used, "subgraphs": [g.to_dict() for g in self.subgraphs]}


def subtree_nodes(children, root):
    out = []
    stack = [root]
    while stack:
        nid = stack.pop()
        out.append(nid)
        stack.extend(children[nid])
    return out


def group_statements(sizes, lambda_):
    """Index groups closed when the running size reaches ``lambda_``."""
    groups, current, total = [], [], 0
    for i, size in enumerate(sizes):
        current.append(i)
        total += size
        if total >= lambda_ or i == len(sizes) - 1:
            groups.append(current)
            current, total = [], 0
    return groups


def _restore_edges(sast, node_set, carried):
    native = node_set - carried
    edges = []
    for s, d, k in sast.edges:
        if k == EdgeKind.DataFlow:
            keep = s in node_set and d in node_set
        else:
            keep = s in native and d in native
        if keep:
            edges.append((s, d, k))
    return tuple(edges)


def partition(sast, cfg=None):
    """Split ``sast`` into statement-ordered subgraphs."""
    if cfg is None:
        cfg = PartitionConfig()
    elif not isinstance(cfg, PartitionConfig):
        cfg = PartitionConfig(cfg)
    lam = cfg.lambda_
    children = sast.tree_children()
    stmts = sast.statements()
    members = [subtree_nodes(children, s) for s in stmts]
    groups = group_statements([len(m) for m in members], lam)

    # Variable occurrences as (name, id); id order is source order.
    var_of = {n.id: n.variable_name for n in sast.nodes if n.variable_name is not None}

    built = []  # (statement idx list, native set, carried set)
    for group in groups:
        native = set()
        for i in group:
            native.update(members[i])
        carried = set()
        if built:
            earlier = {}
            for _, prev_native, prev_carried in built:
                for nid in prev_native | prev_carried:
                    name = var_of.get(nid)
                    if name is not None and nid > earlier.get(name, -1):
                        earlier[name] = nid
            for name in {var_of[n] for n in native if n in var_of}:
                if name in earlier:
                    carried.add(earlier[name])
        built.append((list(group), native, carried))

    if len(built) > 1 and len(built[-1][1] | built[-1][2]) < lam / 2:
        g2, n2, c2 = built.pop()
        g1, n1, c1 = built.pop()
        native = n1 | n2
        built.append((g1 + g2, native, (c1 | c2) - native))

    vocab = sast.vocab_ids
    subgraphs = []
    for k, (group, native, carried) in enumerate(built):
        node_set = native | carried
        ids = tuple(sorted(node_set))
        subgraphs.append(
            Subgraph(
                node_ids=ids,
                edges=_restore_edges(sast, node_set, carried),
                order_index=k,
                carried_nodes=frozenset(carried),
                statements=tuple(stmts[i] for i in group),
                vocab_ids=tuple(int(v) for v in np.asarray(vocab)[list(ids)]),
            )
        )
    return PartitionResult(tuple(subgraphs), lam)
