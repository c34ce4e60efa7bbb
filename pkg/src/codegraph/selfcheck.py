"""Numerical self-checks: gradient agreement and permutation invariance."""

import numpy as np

from codegraph.frontend import parse
from codegraph.gnn.backward import finite_diff_check
from codegraph.gnn.kernel import GraphInput, ggnn_forward
from codegraph.gnn.params import PgnnConfig, PgnnParams
from codegraph.partition import partition
from codegraph.sast import EdgeKind, build_sast, default_vocabulary

# 12 S-AST nodes; lambda=1 yields two subgraphs.
GRADIENT_SNIPPET = "void f(){ return; a = b; }"
GRADIENT_TOL = 1e-4
PERMUTATION_TOL = 1e-9


def random_graph(rng, max_nodes=30, vocab_size=64, n_vocab=6):
    """Random connected graph with typed edges over a few vocab ids."""
    n = int(rng.integers(1, max_nodes + 1))
    vocab = rng.integers(0, vocab_size, size=n_vocab)[rng.integers(0, n_vocab, size=n)]
    edges = [(int(rng.integers(0, i)), i, EdgeKind.AstChild) for i in range(1, n)]
    for _ in range(int(rng.integers(0, n + 1))):
        a, b = (int(x) for x in rng.integers(0, n, size=2))
        if a != b:
            edges.append((a, b, EdgeKind(int(rng.integers(1, len(EdgeKind))))))
    return GraphInput.from_edges(vocab, edges)


def permutation_invariance_error(graph, params, rng):
    perm = rng.permutation(graph.n_nodes)
    _, g1 = ggnn_forward(graph, params)
    _, g2 = ggnn_forward(graph.permuted(perm), params)
    return float(np.max(np.abs(g1 - g2)))


def run_selfcheck(dims=8, seed=7, n_graphs=20, epsilon=1e-5):
    """Return a report dict with one entry per check and an overall ``passed``."""
    rng = np.random.default_rng(seed)
    vocab = default_vocabulary()
    params = PgnnParams.init(PgnnConfig(vocab.size, d=dims), seed)
    sast = build_sast(parse(GRADIENT_SNIPPET), vocab)
    grad_err = finite_diff_check(params, sast, epsilon, parts=partition(sast, 1), seed=seed)

    small = PgnnParams.init(PgnnConfig(64, d=dims), seed)
    perm_err = max(
        permutation_invariance_error(random_graph(rng), small, rng) for _ in range(n_graphs)
    )
    checks = {
        "gradient": {
            "max_relative_error": grad_err,
            "tolerance": GRADIENT_TOL,
            "nodes": len(sast),
            "epsilon": epsilon,
            "passed": bool(grad_err < GRADIENT_TOL),
        },
        "permutation_invariance": {
            "max_abs_difference": perm_err,
            "tolerance": PERMUTATION_TOL,
            "graphs": n_graphs,
            "passed": bool(perm_err < PERMUTATION_TOL),
        },
    }
    return {
        "dims": dims,
        "seed": seed,
        "checks": checks,
        "passed": all(c["passed"] for c in checks.values()),
    }
