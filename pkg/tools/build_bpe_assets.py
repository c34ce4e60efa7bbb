"""Regenerate the shipped subword vocabulary and merge table.

Input is a GPT-2 rank file in tiktoken format (``base64-token rank`` per
line), e.g. ``whisper/assets/gpt2.tiktoken`` from the openai-whisper sdist
(MIT licensed).  RoBERTa reuses the GPT-2 byte-level BPE, so the merge table
is identical; the vocabulary is laid out with RoBERTa's extra entries
(``<s> <pad> </s> <unk>``, three ``madeupword`` fillers and ``<mask>``),
giving 50,265 entries.  Ids follow GPT-2 rank order, not fairseq's
frequency order.

Usage::

    python tools/build_bpe_assets.py gpt2.tiktoken src/codegraph/data
"""

import base64
import sys
from pathlib import Path


def bytes_to_unicode():
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


def split_by_ranks(token, ranks, max_rank):
    parts = [bytes([b]) for b in token]
    while True:
        best = None
        for i in range(len(parts) - 1):
            r = ranks.get(parts[i] + parts[i + 1])
            if r is not None and r < max_rank and (best is None or r < best[0]):
                best = (r, i)
        if best is None:
            return parts
        i = best[1]
        parts[i : i + 2] = [parts[i] + parts[i + 1]]


def main(src, out_dir):
    ranks = {}
    for line in Path(src).read_text().splitlines():
        tok, rank = line.split()
        ranks[base64.b64decode(tok)] = int(rank)
    by_rank = sorted(ranks, key=ranks.get)
    enc = bytes_to_unicode()

    def show(b):
        return "".join(enc[x] for x in b)

    merges = []
    for tok in by_rank:
        if len(tok) == 1:
            continue
        parts = split_by_ranks(tok, ranks, ranks[tok])
        if len(parts) != 2:
            raise SystemExit(f"token {tok!r} does not decompose into one merge")
        merges.append(f"{show(parts[0])} {show(parts[1])}")

    entries = ["<s>", "<pad>", "</s>", "<unk>"]
    entries += [show(t) for t in by_rank]
    entries += ["<|endoftext|>", "madeupword0000", "madeupword0001", "madeupword0002", "<mask>"]

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "merges.txt").write_text("#version: 0.2\n" + "\n".join(merges) + "\n", encoding="utf-8")
    (out / "vocab.txt").write_text(
        "".join(f"{e}\t{i}\n" for i, e in enumerate(entries)), encoding="utf-8"
    )
    print(f"{len(merges)} merges, {len(entries)} vocabulary entries")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
