"""Reverse-mode gradients of the PGNN forward pass, and a finite-difference check.

Only used to verify the kernels; there is no optimiser or training loop.
The scalar checked is ``loss = ||E_p||^2``.
"""

import math

import numpy as np

from codegraph.gnn.kernel import pgnn_forward
from codegraph.partition import PartitionConfig, partition


def _dsig(y, linear):
    return 1.0 if linear else y * (1.0 - y)


def _dtanh(y, linear):
    return 1.0 if linear else 1.0 - y * y


def zero_grads(params):
    return {name: np.zeros_like(t) for name, t in params.tensors.items()}


def ggnn_backward(cache, params, d_readout, grads):
    g = cache["graph"]
    cfg = params.cfg
    d, lin = cfg.d, cfg.linear
    dh = np.broadcast_to(d_readout / g.n_nodes, (g.n_nodes, d)).copy()
    for l in reversed(range(cfg.layers)):
        p = f"ggnn.{l}."
        c = cache["layers"][l]
        if c["mask"] is not None:
            dh = dh * c["mask"]
        h, z, n, r, gh = c["h"], c["z"], c["n"], c["r"], c["gh"]
        dn = dh * (1.0 - z)
        dz = dh * (h - n)
        dh_prev = dh * z
        dan = dn * _dtanh(n, lin)
        dr = dan * gh[:, 2 * d :]
        dar = dr * _dsig(r, lin)
        daz = dz * _dsig(z, lin)
        dgi = np.concatenate([dar, daz, dan], axis=1)
        dgh = np.concatenate([dar, daz, dan * r], axis=1)
        grads[p + "gru.w_ih"] += c["m"].T @ dgi
        grads[p + "gru.b_ih"] += dgi.sum(axis=0)
        grads[p + "gru.w_hh"] += h.T @ dgh
        grads[p + "gru.b_hh"] += dgh.sum(axis=0)
        dm = dgi @ params[p + "gru.w_ih"].T
        dh_prev += dgh @ params[p + "gru.w_hh"].T

        dmsg = dm[g.receivers]
        grads[p + "msg.w2"] += c["z1"].T @ dmsg
        grads[p + "msg.b2"] += dmsg.sum(axis=0)
        da1 = (dmsg @ params[p + "msg.w2"].T) * _dtanh(c["z1"], lin)
        grads[p + "msg.w1"] += c["x"].T @ da1
        grads[p + "msg.b1"] += da1.sum(axis=0)
        dx = da1 @ params[p + "msg.w1"].T
        np.add.at(dh_prev, g.senders, dx[:, :d])
        dh = dh_prev
    np.add.at(grads["node_embed"], g.vocab_ids, dh)


def lstm_backward(caches, params, d_out, grads):
    """Backpropagate ``d_out`` (T x d, top-layer outputs) to the layer-0 inputs."""
    cfg = params.cfg
    lin = cfg.linear
    for k in reversed(range(cfg.lstm_layers)):
        p = f"lstm.{k}."
        w_ih, w_hh = params[p + "w_ih"], params[p + "w_hh"]
        steps = caches[k]
        dx = np.zeros((len(steps), w_ih.shape[0]))
        dh_next = np.zeros(cfg.d)
        dc_next = np.zeros(cfg.d)
        for t in reversed(range(len(steps))):
            s = steps[t]
            dh = d_out[t] + dh_next
            do = dh * s["tc"]
            dc = dc_next + dh * s["o"] * _dtanh(s["tc"], lin)
            da = np.concatenate(
                [
                    dc * s["g"] * _dsig(s["i"], lin),
                    dc * s["c"] * _dsig(s["f"], lin),
                    dc * s["i"] * _dtanh(s["g"], lin),
                    do * _dsig(s["o"], lin),
                ]
            )
            grads[p + "w_ih"] += np.outer(s["x"], da)
            grads[p + "w_hh"] += np.outer(s["h"], da)
            grads[p + "b"] += da
            dx[t] = w_ih @ da
            dh_next = w_hh @ da
            dc_next = dc * s["f"]
        d_out = dx
    return d_out


def loss_and_grads(sast, parts, params):
    """``||E_p||^2`` and its gradient with respect to every tensor."""
    ep, cache = pgnn_forward(sast, parts, params, return_cache=True)
    loss = float(ep @ ep)
    grads = zero_grads(params)
    d_ep = 2.0 * ep
    grads["fc_p.w"] += np.outer(cache["joined"], d_ep)
    grads["fc_p.b"] += d_ep
    d_joined = params["fc_p.w"] @ d_ep
    d = params.cfg.d
    d_out = np.zeros((len(cache["sub_embs"]), d))
    d_out[-1] = d_joined[d:]
    d_subs = lstm_backward(cache["lstm_cache"], params, d_out, grads)
    for sub_cache, d_g in zip(cache["sub_caches"], d_subs):
        ggnn_backward(sub_cache, params, d_g, grads)
    ggnn_backward(cache["whole_cache"], params, d_joined[:d], grads)
    return loss, grads


def _loss(sast, parts, params):
    ep = pgnn_forward(sast, parts, params)
    return float(ep @ ep)


def sample_coordinates(params, sast, fraction, rng, tensors=None):
    """``(name, flat_index)`` pairs: ``fraction`` of each tensor, at least one.

    Embedding rows never looked up by ``sast`` have zero gradient on both
    sides, so only rows of vocab ids present in the graph are sampled.
    """
    coords = []
    d = params.cfg.d
    for name, t in params.tensors.items():
        if tensors is not None and name not in tensors:
            continue
        if name == "node_embed":
            rows = np.unique(sast.vocab_ids)
            candidates = (rows[:, None] * d + np.arange(d)).ravel()
        else:
            candidates = np.arange(t.size)
        k = max(1, math.ceil(fraction * len(candidates)))
        for idx in rng.choice(candidates, size=k, replace=False):
            coords.append((name, int(idx)))
    return coords


def gradient_check(
    params, sast, epsilon=1e-5, parts=None, lambda_=8, fraction=0.05, seed=0, tensors=None
):
    """Compare analytic and central-difference gradients on sampled coordinates.

    Returns a list of ``(name, index, analytic, numeric, rel_error)``.  The
    relative error is ``|a - n| / max(|a|, |n|, floor)`` where ``floor`` is
    1e-3 of the largest sampled numeric gradient, so coordinates whose true
    gradient is negligible are judged on the scale of the whole sample
    instead of amplifying round-off.
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise ValueError("epsilon must lie in [1e-7, 1e-3]")
    if parts is None:
        parts = partition(sast, PartitionConfig(lambda_))
    _, grads = loss_and_grads(sast, parts, params)
    rng = np.random.default_rng(seed)
    work = params.copy()
    rows = []
    for name, idx in sample_coordinates(work, sast, fraction, rng, tensors):
        flat = work.tensors[name].reshape(-1)
        orig = flat[idx]
        flat[idx] = orig + epsilon
        plus = _loss(sast, parts, work)
        flat[idx] = orig - epsilon
        minus = _loss(sast, parts, work)
        flat[idx] = orig
        numeric = (plus - minus) / (2.0 * epsilon)
        rows.append([name, idx, float(grads[name].reshape(-1)[idx]), numeric])
    scale = max((abs(r[3]) for r in rows), default=0.0)
    floor = max(1e-3 * scale, np.finfo(float).tiny)
    out = []
    for name, idx, a, n in rows:
        out.append((name, idx, a, n, abs(a - n) / max(abs(a), abs(n), floor)))
    return out


def finite_diff_check(
    params, sast, epsilon=1e-5, parts=None, lambda_=8, fraction=0.05, seed=0, tensors=None
):
    """Maximum relative gradient error over a random parameter sample."""
    rows = gradient_check(params, sast, epsilon, parts, lambda_, fraction, seed, tensors)
    return max(r[4] for r in rows)
