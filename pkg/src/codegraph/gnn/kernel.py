"""GGNN message passing, LSTM over subgraph embeddings and the PGNN head.

Every forward function can return a cache consumed by the matching
function in ``codegraph.gnn.backward``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from codegraph.errors import NonFinite, ShapeMismatch
from codegraph.partition import Subgraph
from codegraph.sast.graph import SAst


class EmbeddingKind(Enum):
    SubgraphG = "SubgraphG"
    WholeGraphC = "WholeGraphC"
    LstmOut = "LstmOut"
    Ep = "Ep"
    Ef = "Ef"


@dataclass(frozen=True)
class Embedding:
    v: np.ndarray
    kind: EmbeddingKind

    def __len__(self):
        return len(self.v)


@dataclass(frozen=True)
class GraphInput:
    """Flat message-passing view: each stored edge yields two directed messages."""

    vocab_ids: np.ndarray
    senders: np.ndarray
    receivers: np.ndarray
    features: np.ndarray  # index into the one-hot edge feature table

    @property
    def n_nodes(self):
        return len(self.vocab_ids)

    @classmethod
    def from_edges(cls, vocab_ids, edges):
        """``edges`` are ``(src, dst, kind)`` over local indices."""
        vocab_ids = np.asarray(vocab_ids, dtype=np.int64)
        if len(edges):
            e = np.asarray([(s, d, int(k)) for s, d, k in edges], dtype=np.int64)
            src, dst, kind = e[:, 0], e[:, 1], e[:, 2]
        else:
            src = dst = kind = np.zeros(0, dtype=np.int64)
        senders = np.concatenate([src, dst])
        receivers = np.concatenate([dst, src])
        features = np.concatenate([2 * kind, 2 * kind + 1])
        return cls(vocab_ids, senders, receivers, features)

    def permuted(self, perm):
        """Relabel node ``i`` as ``perm[i]``."""
        perm = np.asarray(perm)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        return GraphInput(self.vocab_ids[inv], perm[self.senders], perm[self.receivers], self.features)


def graph_input(graph):
    if isinstance(graph, GraphInput):
        return graph
    if isinstance(graph, SAst):
        return GraphInput.from_edges(graph.vocab_ids, graph.edges)
    if isinstance(graph, Subgraph):
        local = {nid: i for i, nid in enumerate(graph.node_ids)}
        edges = [(local[s], local[d], k) for s, d, k in graph.edges]
        return GraphInput.from_edges(graph.vocab_ids, edges)
    raise TypeError(f"cannot build a graph input from {type(graph).__name__}")


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def activations(linear):
    """``(sigmoid, tanh)`` pair; both identity in the linear toy configuration."""
    if linear:
        return (lambda x: x), (lambda x: x)
    return _sigmoid, np.tanh


def _check_finite(x, where):
    if not np.all(np.isfinite(x)):
        raise NonFinite(f"non-finite values in {where}")


def ggnn_forward(graph, params, training=False, seed=0, return_cache=False):
    """Run the GGNN layers over ``graph``; return ``(node_states, G)``.

    ``G`` is the mean of the final node states.  Dropout on node states is
    applied only when ``training`` is true.
    """
    g = graph_input(graph)
    cfg = params.cfg
    d = cfg.d
    if g.n_nodes == 0:
        raise ShapeMismatch("graph has no nodes")
    if g.vocab_ids.min() < 0 or g.vocab_ids.max() >= cfg.vocab_size:
        raise ShapeMismatch(f"vocab id outside embedding table of size {cfg.vocab_size}")
    sig, tanh = activations(cfg.linear)
    edge_table = np.eye(cfg.e_dim)[g.features]
    rng = np.random.default_rng(seed) if training and cfg.dropout > 0 else None

    h = params["node_embed"][g.vocab_ids]
    _check_finite(h, "node embeddings")
    layers = []
    for l in range(cfg.layers):
        p = f"ggnn.{l}."
        x = np.concatenate([h[g.senders], edge_table], axis=1)
        a1 = x @ params[p + "msg.w1"] + params[p + "msg.b1"]
        z1 = tanh(a1)
        msg = z1 @ params[p + "msg.w2"] + params[p + "msg.b2"]
        m = np.zeros((g.n_nodes, d))
        np.add.at(m, g.receivers, msg)

        gi = m @ params[p + "gru.w_ih"] + params[p + "gru.b_ih"]
        gh = h @ params[p + "gru.w_hh"] + params[p + "gru.b_hh"]
        r = sig(gi[:, :d] + gh[:, :d])
        z = sig(gi[:, d : 2 * d] + gh[:, d : 2 * d])
        n = tanh(gi[:, 2 * d :] + r * gh[:, 2 * d :])
        h_new = (1.0 - z) * n + z * h
        mask = None
        if rng is not None:
            keep = 1.0 - cfg.dropout
            mask = (rng.random(h_new.shape) < keep) / keep
            h_new = h_new * mask
        _check_finite(h_new, f"GGNN layer {l}")
        layers.append(dict(h=h, x=x, a1=a1, z1=z1, m=m, gh=gh, r=r, z=z, n=n, mask=mask))
        h = h_new
    readout = h.mean(axis=0)
    if return_cache:
        return h, readout, dict(graph=g, layers=layers, h_final=h)
    return h, readout


def lstm_forward(seq, params, return_cache=False):
    """Unidirectional stacked LSTM from zero state; returns top-layer outputs."""
    cfg = params.cfg
    d = cfg.d
    x = np.asarray([s.v if isinstance(s, Embedding) else s for s in seq], dtype=np.float64)
    if x.ndim != 2 or len(x) == 0:
        raise ShapeMismatch("LSTM input must be a non-empty sequence of vectors")
    if x.shape[1] != d:
        raise ShapeMismatch(f"LSTM input width {x.shape[1]} != {d}")
    sig, tanh = activations(cfg.linear)
    caches = []
    for k in range(cfg.lstm_layers):
        p = f"lstm.{k}."
        w_ih, w_hh, b = params[p + "w_ih"], params[p + "w_hh"], params[p + "b"]
        h = np.zeros(d)
        c = np.zeros(d)
        steps = []
        out = np.empty_like(x)
        for t in range(len(x)):
            a = x[t] @ w_ih + h @ w_hh + b
            i, f = sig(a[:d]), sig(a[d : 2 * d])
            gg, o = tanh(a[2 * d : 3 * d]), sig(a[3 * d :])
            c_new = f * c + i * gg
            tc = tanh(c_new)
            h_new = o * tc
            steps.append(dict(x=x[t], h=h, c=c, i=i, f=f, g=gg, o=o, tc=tc))
            h, c = h_new, c_new
            out[t] = h
        _check_finite(out, f"LSTM layer {k}")
        caches.append(steps)
        x = out
    if return_cache:
        return x, caches
    return x


def fc_forward(x, w, b):
    return x @ w + b


def pgnn_forward(sast, parts, params, training=False, seed=0, return_cache=False):
    """Compute E_p for ``sast`` given its partition; arrays in, array out."""
    sub_caches, sub_embs = [], []
    for k, sub in enumerate(parts.subgraphs):
        res = ggnn_forward(sub, params, training, seed + 1 + k, return_cache)
        sub_embs.append(res[1])
        if return_cache:
            sub_caches.append(res[2])
    lstm = lstm_forward(sub_embs, params, return_cache)
    outputs = lstm[0] if return_cache else lstm
    whole = ggnn_forward(sast, params, training, seed, return_cache)
    joined = np.concatenate([whole[1], outputs[-1]])
    ep = fc_forward(joined, params["fc_p.w"], params["fc_p.b"])
    _check_finite(ep, "E_p")
    if return_cache:
        cache = dict(
            sub_caches=sub_caches,
            sub_embs=np.asarray(sub_embs),
            lstm_cache=lstm[1],
            whole_cache=whole[2],
            joined=joined,
        )
        return ep, cache
    return ep


def pgnn_embed(sast, parts, params, training=False, seed=0):
    """E_p = FC([C ; O[-1]]) with C the whole-graph readout, O the LSTM outputs."""
    return Embedding(pgnn_forward(sast, parts, params, training, seed), EmbeddingKind.Ep)


def subgraph_embeddings(parts, params):
    return [Embedding(ggnn_forward(s, params)[1], EmbeddingKind.SubgraphG) for s in parts.subgraphs]
