"""Functionality-disjoint clone-detection splits and corpus statistics."""

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from codegraph.errors import (
    CodeGraphError,
    FormatError,
    InsufficientFunctionalities,
    InsufficientNegatives,
)
from codegraph.frontend import SourceUnit, parse
from codegraph.partition import recommend_lambda
from codegraph.sast import build_sast

SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class Fragment:
    id: str
    source: SourceUnit
    functionality_id: int

    def __post_init__(self):
        if self.functionality_id < 0:
            raise ValueError(f"fragment {self.id}: functionality_id must be >= 0")


def load_index(path, read_sources=True):
    """Fragments listed in a ``fragment_id,path,functionality_id`` CSV.

    Paths are resolved relative to the CSV's directory.
    """
    path = Path(path)
    base = path.parent
    fragments = []
    seen = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"fragment_id", "path", "functionality_id"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise FormatError(f"index header must contain {sorted(required)}", 1)
        for lineno, row in enumerate(reader, 2):
            fid = (row["fragment_id"] or "").strip()
            if not fid or fid in seen:
                raise FormatError(f"missing or duplicate fragment_id {fid!r}", lineno)
            seen.add(fid)
            try:
                func = int(row["functionality_id"])
            except (TypeError, ValueError):
                raise FormatError(f"bad functionality_id {row['functionality_id']!r}", lineno) from None
            src_path = base / row["path"].strip()
            text = src_path.read_text(encoding="utf-8") if read_sources else ""
            fragments.append(Fragment(fid, SourceUnit(str(src_path), text), func))
    return fragments


@dataclass(frozen=True)
class Split:
    functionalities: tuple
    pairs: tuple  # (fragment_id_a, fragment_id_b, label)

    @property
    def n_positive(self):
        return sum(1 for p in self.pairs if p[2] == 1)

    @property
    def n_negative(self):
        return sum(1 for p in self.pairs if p[2] == 0)

    def fragment_ids(self):
        return {p[0] for p in self.pairs} | {p[1] for p in self.pairs}

    def to_dict(self):
        return {
            "functionalities": list(self.functionalities),
            "n_positive": self.n_positive,
            "n_negative": self.n_negative,
            "pairs": [list(p) for p in self.pairs],
        }


@dataclass(frozen=True)
class SplitManifest:
    train: Split
    val: Split
    test: Split
    seed: int
    by: str = "functionality"

    def splits(self):
        return {"train": self.train, "val": self.val, "test": self.test}

    def to_dict(self):
        return {
            "seed": self.seed,
            "by": self.by,
            "splits": {name: s.to_dict() for name, s in self.splits().items()},
        }


def _split_pairs(members, rng, max_positives=None):
    """Positive and sampled negative pairs among ``members`` (list of Fragment)."""
    members = sorted(members, key=lambda f: f.id)
    positives = []
    by_func = {}
    for f in members:
        by_func.setdefault(f.functionality_id, []).append(f)
    for func in sorted(by_func):
        group = by_func[func]
        positives.extend((a.id, b.id, 1) for a, b in combinations(group, 2))
    if max_positives is not None and len(positives) > max_positives:
        keep = np.sort(rng.choice(len(positives), size=max_positives, replace=False))
        positives = [positives[i] for i in keep]
    funcs = np.array([f.functionality_id for f in members])
    ia, ib = np.triu_indices(len(members), k=1)
    cross = funcs[ia] != funcs[ib]
    ia, ib = ia[cross], ib[cross]
    if len(ia) < len(positives):
        raise InsufficientNegatives(
            f"{len(positives)} positive pairs but only {len(ia)} cross-functionality pairs"
        )
    pick = np.sort(rng.choice(len(ia), size=len(positives), replace=False))
    negatives = [(members[ia[i]].id, members[ib[i]].id, 0) for i in pick]
    return tuple(positives + negatives)


def build_split(fragments, counts, seed=0, by="functionality", max_positives=None):
    """Assign functionalities (or fragments, with ``by="random"``) to train/val/test.

    Only functionalities with at least two fragments are eligible.  Each
    split holds every same-functionality pair as a positive (optionally
    capped) and the same number of cross-functionality negatives sampled
    uniformly without replacement from inside the split.
    """
    counts = tuple(int(c) for c in counts)
    if len(counts) != 3 or min(counts) < 0:
        raise ValueError("counts must be three non-negative integers")
    rng = np.random.default_rng(seed)
    by_func = {}
    for f in fragments:
        by_func.setdefault(f.functionality_id, []).append(f)

    if by == "functionality":
        eligible = sorted(k for k, v in by_func.items() if len(v) >= 2)
        if sum(counts) > len(eligible):
            raise InsufficientFunctionalities(
                f"requested {sum(counts)} functionalities, {len(eligible)} have at least 2 fragments"
            )
        order = [eligible[i] for i in rng.permutation(len(eligible))]
        bounds = np.cumsum((0,) + counts)
        groups = [sorted(order[bounds[k] : bounds[k + 1]]) for k in range(3)]
        members = [[f for func in g for f in by_func[func]] for g in groups]
    elif by == "random":
        frags = sorted(fragments, key=lambda f: f.id)
        perm = rng.permutation(len(frags))
        total = sum(counts)
        if total == 0:
            raise ValueError("counts must not all be zero")
        cuts = np.floor(np.cumsum(counts) / total * len(frags)).astype(int)
        cuts = np.concatenate([[0], cuts])
        members = [[frags[i] for i in perm[cuts[k] : cuts[k + 1]]] for k in range(3)]
        groups = [sorted({f.functionality_id for f in m}) for m in members]
    else:
        raise ValueError(f"unknown split mode {by!r}")

    splits = [
        Split(tuple(int(g) for g in groups[k]), _split_pairs(members[k], rng, max_positives))
        for k in range(3)
    ]
    return SplitManifest(*splits, seed=seed, by=by)


@dataclass(frozen=True)
class CorpusStats:
    fragment_count: int
    functionality_count: int
    avg_sast_nodes: float
    parse_failures: int
    recommended_lambda: int | None

    def to_dict(self):
        return {
            "fragment_count": self.fragment_count,
            "functionality_count": self.functionality_count,
            "avg_sast_nodes": self.avg_sast_nodes,
            "parse_failures": self.parse_failures,
            "recommended_lambda": self.recommended_lambda,
        }


def sast_size(unit):
    """S-AST node count of ``unit``, or None if it does not parse."""
    try:
        return len(build_sast(parse(unit)))
    except CodeGraphError:
        return None


def corpus_stats(fragments, jobs=1):
    """Average S-AST size over fragments that parse; failures are counted."""
    units = [f.source for f in fragments]
    if jobs > 1 and len(units) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            sizes = list(pool.map(sast_size, units, chunksize=8))
    else:
        sizes = [sast_size(u) for u in units]
    ok = [s for s in sizes if s is not None]
    avg = float(np.mean(ok)) if ok else 0.0
    return CorpusStats(
        fragment_count=len(fragments),
        functionality_count=len({f.functionality_id for f in fragments}),
        avg_sast_nodes=avg,
        parse_failures=len(sizes) - len(ok),
        recommended_lambda=recommend_lambda(avg) if ok else None,
    )
