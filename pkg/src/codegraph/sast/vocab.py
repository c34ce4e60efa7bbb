"""Combined subword + node-kind vocabulary."""

from dataclasses import dataclass, field
from functools import lru_cache

from codegraph.errors import FormatError, VocabularyMiss
from codegraph.frontend.grammar import NON_LEAF_KINDS
from codegraph.sast.bpe import default_vocab_path

UNK = "<unk>"


def load_subwords(path):
    """Read ``token<TAB>id`` lines; ids must be dense from 0."""
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            token, sep, idx = line.rpartition("\t")
            if not sep or not token:
                raise FormatError(f"expected 'token<TAB>id', got {line!r}", lineno)
            try:
                idx = int(idx)
            except ValueError:
                raise FormatError(f"non-integer id {idx!r}", lineno) from None
            if token in entries:
                raise FormatError(f"duplicate token {token!r}", lineno)
            entries[token] = idx
    if sorted(entries.values()) != list(range(len(entries))):
        raise FormatError("subword ids are not dense in 0..n-1")
    return entries


@dataclass(frozen=True)
class Vocabulary:
    """Subword entries take ids ``0..base_size-1``; kinds follow them."""

    subwords: dict = field(repr=False)
    kinds: dict

    @property
    def base_size(self):
        return len(self.subwords)

    @property
    def kind_size(self):
        return len(self.kinds)

    @property
    def size(self):
        return self.base_size + self.kind_size

    def __len__(self):
        return self.size

    @property
    def entries(self):
        """All entries; kind names are prefixed with ``@`` to keep them apart."""
        out = dict(self.subwords)
        out.update({"@" + k: v for k, v in self.kinds.items()})
        return out

    def subword_id(self, subtoken):
        idx = self.subwords.get(subtoken)
        if idx is None:
            idx = self.subwords.get(UNK)
            if idx is None:
                raise VocabularyMiss(f"subword {subtoken!r} not in vocabulary")
        return idx

    def kind_id(self, name):
        try:
            return self.kinds[name]
        except KeyError:
            raise VocabularyMiss(f"node kind {name!r} not in vocabulary") from None

    def token_of(self, idx):
        if idx >= self.base_size:
            for name, i in self.kinds.items():
                if i == idx:
                    return name
        for tok, i in self.subwords.items():
            if i == idx:
                return tok
        raise KeyError(idx)


def build_vocabulary(kinds=NON_LEAF_KINDS, subwords=None):
    """Vocabulary from a subword table (path or mapping) plus non-leaf kinds."""
    if subwords is None:
        subwords = default_vocab_path()
    if not isinstance(subwords, dict):
        subwords = load_subwords(subwords)
    base = len(subwords)
    names = [k if isinstance(k, str) else k.name for k in kinds]
    return Vocabulary(subwords=dict(subwords), kinds={n: base + i for i, n in enumerate(names)})


@lru_cache(maxsize=1)
def default_vocabulary():
    return build_vocabulary()
