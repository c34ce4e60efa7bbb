"""Byte-level BPE segmentation over a GPT-2 style merge table.

Subtokens are returned in the byte-to-unicode alphabet used by the vocabulary
file, so ``"Ġworld"`` stands for the bytes ``b" world"``.  For printable
ASCII without spaces the alphabet is the identity.
"""

from functools import lru_cache
from importlib import resources
from pathlib import Path

import regex

from codegraph.errors import FormatError

# GPT-2 pre-tokenisation pattern.
_PRETOKENIZE = regex.compile(
    r"""'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+"""
)


@lru_cache(maxsize=None)
def bytes_to_unicode():
    """Reversible map from the 256 byte values to printable unicode characters."""
    bs = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(ord("¡"), ord("¬") + 1))
        + list(range(ord("®"), ord("ÿ") + 1))
    )
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, (chr(c) for c in cs)))


@lru_cache(maxsize=None)
def _unicode_to_bytes():
    return {c: b for b, c in bytes_to_unicode().items()}


def encode_bytes(data):
    table = bytes_to_unicode()
    return "".join(table[b] for b in data)


def decode_units(units):
    """Inverse of the byte alphabet: concatenated subtokens back to bytes."""
    table = _unicode_to_bytes()
    return bytes(table[c] for unit in units for c in unit)


class MergeTable:
    """Ranked merges ``(left, right) -> rank``; lower rank merges first."""

    def __init__(self, pairs):
        self.ranks = {}
        for rank, pair in enumerate(pairs):
            self.ranks.setdefault(tuple(pair), rank)
        self._cache = {}

    def __len__(self):
        return len(self.ranks)

    @classmethod
    def load(cls, path):
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line or line.startswith("#version"):
                    continue
                parts = line.split(" ")
                if len(parts) != 2 or not parts[0] or not parts[1]:
                    raise FormatError(f"expected 'left right', got {line!r}", lineno)
                pairs.append(parts)
        return cls(pairs)

    def segment(self, word):
        """Apply merges to one pre-tokenised chunk (already byte-mapped)."""
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        parts = list(word)
        ranks = self.ranks
        while len(parts) > 1:
            best_rank, best_i = None, -1
            for i in range(len(parts) - 1):
                r = ranks.get((parts[i], parts[i + 1]))
                if r is not None and (best_rank is None or r < best_rank):
                    best_rank, best_i = r, i
            if best_rank is None:
                break
            pair = (parts[best_i], parts[best_i + 1])
            merged = []
            i = 0
            while i < len(parts):
                if i < len(parts) - 1 and (parts[i], parts[i + 1]) == pair:
                    merged.append(parts[i] + parts[i + 1])
                    i += 2
                else:
                    merged.append(parts[i])
                    i += 1
            parts = merged
        result = tuple(parts)
        if len(self._cache) < 100_000:
            self._cache[word] = result
        return result


def subtokenize(token, merges):
    """Segment ``token`` into byte-level BPE subtokens.

    >>> subtokenize("getLarger", default_merges())
    ['get', 'L', 'arger']
    """
    out = []
    for chunk in _PRETOKENIZE.findall(token):
        out.extend(merges.segment(encode_bytes(chunk.encode("utf-8"))))
    return out


def _data_path(name):
    return resources.files("codegraph").joinpath("data", name)


def default_merges_path():
    return Path(str(_data_path("merges.txt")))


def default_vocab_path():
    return Path(str(_data_path("vocab.txt")))


@lru_cache(maxsize=1)
def default_merges():
    return MergeTable.load(default_merges_path())
