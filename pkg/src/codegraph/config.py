"""Key-value configuration with precedence: CLI flags > config file > defaults.

File format: one ``key = value`` per line, ``#`` starts a comment, blank
lines ignored.  Keys are listed in ``DEFAULTS``.
"""

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from codegraph.ek import MAX_LENGTH
from codegraph.errors import FormatError

ENV_VAR = "CODEGRAPH_CONFIG"
DEFAULT_PATH = "codegraph.conf"
PATH_KEYS = ("params", "vocab", "merges", "api_pairs")


@dataclass(frozen=True)
class Config:
    lambda_: int = 30
    dims: int = 32
    seed: int = 0
    params: str | None = None
    vocab: str | None = None
    merges: str | None = None
    api_pairs: str | None = None
    encoder: str = "reference"
    encoder_command: str | None = None
    task: str = "clone"
    max_length: int | None = None
    threshold: float = 0.5
    jobs: int = 1

    def __post_init__(self):
        if self.lambda_ < 1:
            raise FormatError("lambda must be >= 1")
        if self.dims < 2:
            raise FormatError("dims must be >= 2")
        if self.task not in MAX_LENGTH:
            raise FormatError(f"task must be one of {sorted(MAX_LENGTH)}")
        if self.encoder not in ("reference", "external"):
            raise FormatError("encoder must be 'reference' or 'external'")

    @property
    def effective_max_length(self):
        return self.max_length if self.max_length is not None else MAX_LENGTH[self.task]

    def check_paths(self):
        for key in PATH_KEYS:
            value = getattr(self, key)
            if value is not None and not Path(value).exists():
                raise FileNotFoundError(f"{key}: no such file {value!r}")
        return self


_FILE_KEYS = {("lambda" if f.name == "lambda_" else f.name): f.name for f in fields(Config)}
_INT_KEYS = frozenset({"lambda_", "dims", "seed", "max_length", "jobs"})


def _coerce(name, raw):
    if name in _INT_KEYS:
        return int(raw)
    if name == "threshold":
        return float(raw)
    return raw


def read_config_file(path):
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in _FILE_KEYS:
            raise FormatError(f"unknown or malformed setting {line!r}", lineno)
        name = _FILE_KEYS[key]
        try:
            values[name] = _coerce(name, value)
        except ValueError:
            raise FormatError(f"bad value for {key}: {value!r}", lineno) from None
    return values


def load_config(path=None, overrides=None):
    """Merge defaults, the config file and non-None ``overrides``."""
    if path is None:
        path = os.environ.get(ENV_VAR)
        if path is None and Path(DEFAULT_PATH).exists():
            path = DEFAULT_PATH
    cfg = Config()
    if path is not None:
        cfg = replace(cfg, **read_config_file(path))
    if overrides:
        cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg
