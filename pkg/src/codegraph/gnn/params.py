"""Named parameter tensors for the PGNN forward pipeline."""

import json
from dataclasses import asdict, dataclass

import numpy as np

from codegraph.errors import FormatError, ShapeMismatch
from codegraph.sast.graph import EDGE_FEATURE_DIM

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class PgnnConfig:
    vocab_size: int
    d: int = 32
    layers: int = 3
    lstm_layers: int = 2
    e_dim: int = EDGE_FEATURE_DIM
    dropout: float = 0.2
    linear: bool = False  # every activation replaced by identity; gradient-check toy

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if self.layers < 1 or self.lstm_layers < 1:
            raise ValueError("layer counts must be positive")
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be positive")


def tensor_shapes(cfg):
    d, e = cfg.d, cfg.e_dim
    shapes = {"node_embed": (cfg.vocab_size, d)}
    for l in range(cfg.layers):
        p = f"ggnn.{l}."
        shapes[p + "msg.w1"] = (d + e, d)
        shapes[p + "msg.b1"] = (d,)
        shapes[p + "msg.w2"] = (d, d)
        shapes[p + "msg.b2"] = (d,)
        # gate order: reset, update, candidate
        shapes[p + "gru.w_ih"] = (d, 3 * d)
        shapes[p + "gru.w_hh"] = (d, 3 * d)
        shapes[p + "gru.b_ih"] = (3 * d,)
        shapes[p + "gru.b_hh"] = (3 * d,)
    for k in range(cfg.lstm_layers):
        p = f"lstm.{k}."
        # gate order: input, forget, cell, output
        shapes[p + "w_ih"] = (d, 4 * d)
        shapes[p + "w_hh"] = (d, 4 * d)
        shapes[p + "b"] = (4 * d,)
    shapes["fc_p.w"] = (2 * d, d)
    shapes["fc_p.b"] = (d,)
    return shapes


class PgnnParams:
    """All learnable tensors, stored float64 by name.

    Matrices act on row vectors (``x @ w``).
    """

    def __init__(self, cfg, tensors):
        self.cfg = cfg
        self.tensors = dict(tensors)
        self.validate()

    @classmethod
    def init(cls, cfg, seed=0):
        rng = np.random.default_rng(seed)
        tensors = {}
        for name, shape in tensor_shapes(cfg).items():
            if name == "node_embed":
                bound = 0.1
            else:
                bound = 1.0 / np.sqrt(cfg.d)
            tensors[name] = rng.uniform(-bound, bound, size=shape)
        return cls(cfg, tensors)

    def validate(self):
        expected = tensor_shapes(self.cfg)
        if set(expected) != set(self.tensors):
            missing = sorted(set(expected) - set(self.tensors))
            extra = sorted(set(self.tensors) - set(expected))
            raise ShapeMismatch(f"tensor names differ: missing {missing}, unexpected {extra}")
        for name, shape in expected.items():
            t = np.asarray(self.tensors[name], dtype=np.float64)
            if t.shape != shape:
                raise ShapeMismatch(f"{name}: expected {shape}, got {t.shape}")
            self.tensors[name] = t

    def __getitem__(self, name):
        return self.tensors[name]

    def __iter__(self):
        return iter(self.tensors)

    @property
    def d(self):
        return self.cfg.d

    def copy(self):
        return PgnnParams(self.cfg, {k: v.copy() for k, v in self.tensors.items()})

    def n_parameters(self):
        return sum(t.size for t in self.tensors.values())


def save_checkpoint(path, params, extra=None):
    """Write tensors to an ``.npz`` archive with a JSON ``__meta__`` header.

    ``extra`` maps further tensor names (e.g. fusion weights) to arrays.
    """
    meta = {"version": CHECKPOINT_VERSION, "config": asdict(params.cfg)}
    arrays = {name: t for name, t in params.tensors.items()}
    for name, t in (extra or {}).items():
        arrays["extra/" + name] = np.asarray(t, dtype=np.float64)
    arrays["__meta__"] = np.array(json.dumps(meta, sort_keys=True))
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path):
    """Return ``(params, extra)`` from a checkpoint written by ``save_checkpoint``."""
    try:
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["__meta__"]))
            arrays = {k: data[k] for k in data.files if k != "__meta__"}
    except (KeyError, ValueError, OSError) as exc:
        raise FormatError(f"not a codegraph checkpoint: {exc}") from None
    if meta.get("version") != CHECKPOINT_VERSION:
        raise FormatError(f"unsupported checkpoint version {meta.get('version')!r}")
    cfg = PgnnConfig(**meta["config"])
    extra = {k[len("extra/"):]: v for k, v in arrays.items() if k.startswith("extra/")}
    tensors = {k: v for k, v in arrays.items() if not k.startswith("extra/")}
    return PgnnParams(cfg, tensors), extra
