"""External-knowledge transformation of code into text, and text encoders.

The transformed context is the pre-order AST serialisation followed by the
descriptions of every called API found in an ``ApiStore``.
"""

import hashlib
import json
import logging
import shlex
import subprocess
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from codegraph.errors import CodeGraphError, FormatError, ShapeMismatch
from codegraph.frontend.tree import preorder_tokens

log = logging.getLogger(__name__)

# Maximum code length per task profile, in whitespace tokens.
MAX_LENGTH = {"summarization": 256, "clone": 400}


def default_api_pairs_path():
    """The small bundled API description table."""
    return Path(str(resources.files("codegraph").joinpath("data", "api_pairs.tsv")))


@dataclass(frozen=True)
class ApiStore:
    entries: dict = field(default_factory=dict)
    skipped: int = 0

    @property
    def count(self):
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key):
        return key in self.entries

    def get(self, key):
        return self.entries.get(key)


def load_api_pairs(path, strict=False):
    """Read ``QualifiedName<TAB>Description`` lines.

    Malformed lines raise FormatError in strict mode and are skipped and
    counted otherwise.  Duplicate names keep the first description.
    """
    entries = {}
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            name, sep, desc = line.partition("\t")
            name, desc = name.strip(), desc.strip()
            if not sep or not name or not desc or "\t" in desc:
                if strict:
                    raise FormatError("expected 'QualifiedName<TAB>Description'", lineno)
                skipped += 1
                continue
            if name in entries:
                log.warning("duplicate API entry %r on line %d ignored", name, lineno)
                continue
            entries[name] = desc
    return ApiStore(entries, skipped)


@dataclass(frozen=True)
class TransformedContext:
    tokens: tuple
    descriptions: tuple

    @property
    def text(self):
        parts = list(self.tokens) + list(self.descriptions)
        return " ".join(parts)

    def truncated(self, max_tokens):
        """Whitespace-token budget; code tokens are kept before descriptions."""
        code = list(self.tokens[:max_tokens])
        budget = max_tokens - len(code)
        words = []
        for desc in self.descriptions:
            words.extend(desc.split())
        return " ".join(code + words[: max(budget, 0)])


def _qualified_name(ast, nid):
    """Dotted text of a Name / FieldAccess chain, or None for other targets."""
    node = ast.nodes[nid]
    if node.kind.name == "Name":
        return node.token
    if node.kind.name == "FieldAccess":
        head = _qualified_name(ast, node.children[0])
        if head is not None:
            return head + "." + ast.nodes[node.children[1]].token
    return None


def call_keys(ast):
    """Candidate store keys per method-invocation, in source (pre-order) order."""
    out = []
    for nid in ast.walk():
        node = ast.nodes[nid]
        if node.kind.name != "MethodInvocation" or len(node.children) != 3:
            continue
        qualifier = _qualified_name(ast, node.children[0])
        if qualifier is None:
            continue
        member = ast.nodes[node.children[1]].token
        keys = [f"{qualifier}.{member}"]
        last = qualifier.rsplit(".", 1)[-1]
        if last != qualifier:
            keys.append(f"{last}.{member}")
        out.append(keys)
    return out


def transform(ast, store):
    """Pre-order tokens plus matched API descriptions, deduplicated, first use first."""
    seen = set()
    descriptions = []
    for keys in call_keys(ast):
        for key in keys:
            desc = store.get(key)
            if desc is not None:
                if desc not in seen:
                    seen.add(desc)
                    descriptions.append(desc)
                break
    return TransformedContext(tuple(preorder_tokens(ast)), tuple(descriptions))


def _bucket(token, d):
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    value = int.from_bytes(digest, "little")
    return value % d, 1.0 if (value >> 63) & 1 == 0 else -1.0


def hashed_counts(text, d):
    """Signed bucket counts of whitespace tokens, before normalisation."""
    v = np.zeros(d)
    for tok in text.split():
        idx, sign = _bucket(tok, d)
        v[idx] += sign
    return v


def reference_encode(text, d=32):
    """Deterministic bag-of-tokens encoder: hashed signed counts, L2-normalised."""
    v = hashed_counts(text, d)
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else v


class ReferenceEncoder:
    name = "reference"

    def __init__(self, d=32):
        self.d = d

    def encode(self, text):
        return reference_encode(text, self.d)


class ExternalEncoder:
    """Shell out to ``command``: text on stdin, a JSON list of floats on stdout."""

    name = "external"

    def __init__(self, command, d, timeout=120.0):
        self.command = command
        self.d = d
        self.timeout = timeout

    def encode(self, text):
        argv = shlex.split(self.command) if isinstance(self.command, str) else list(self.command)
        try:
            proc = subprocess.run(
                argv,
                input=text.encode("utf-8"),
                capture_output=True,
                timeout=self.timeout,
                check=False,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise CodeGraphError(f"external encoder failed: {exc}") from None
        if proc.returncode != 0:
            raise CodeGraphError(
                f"external encoder exited {proc.returncode}: {proc.stderr.decode(errors='replace').strip()}"
            )
        try:
            v = np.asarray(json.loads(proc.stdout), dtype=np.float64)
        except (ValueError, TypeError) as exc:
            raise FormatError(f"external encoder output is not a JSON vector: {exc}") from None
        if v.shape != (self.d,):
            raise ShapeMismatch(f"external encoder returned shape {v.shape}, expected ({self.d},)")
        return v


def make_encoder(kind, d, command=None):
    if kind == "reference":
        return ReferenceEncoder(d)
    if kind == "external":
        if not command:
            raise CodeGraphError("external encoder needs a command")
        return ExternalEncoder(command, d)
    raise CodeGraphError(f"unknown encoder {kind!r}")
