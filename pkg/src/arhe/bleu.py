"""Corpus-level BLEU against a single reference per sentence."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Sequence


@dataclass(frozen=True)
class BleuReport:
    bleu: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_length: int
    ref_length: int
    matches: tuple[int, ...] = ()
    totals: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        d = asdict(self)
        d["precisions"] = list(self.precisions)
        d["matches"] = list(self.matches)
        d["totals"] = list(self.totals)
        return d


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(hypotheses: Sequence[Sequence[str]], references: Sequence[Sequence[str]],
                max_n: int = 4, smoothing: str = "none") -> BleuReport:
    """BLEU on a 0-100 scale with clipped counts summed over the corpus.

    An n-gram order for which the hypotheses contain no n-grams at all gets
    precision 1, so very short corpora still score 100 against themselves.
    ``smoothing="add-1"`` replaces a zero match count with 1/(total + 1).
    """
    if len(hypotheses) != len(references):
        raise ValueError(f"{len(hypotheses)} hypotheses but {len(references)} references")
    if not hypotheses:
        raise ValueError("no hypotheses to score")
    if smoothing not in ("none", "add-1"):
        raise ValueError(f"unknown smoothing {smoothing!r}")
    if max_n < 1:
        raise ValueError("max_n must be at least 1")

    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            h = _ngram_counts(hyp, n)
            r = _ngram_counts(ref, n)
            matches[n - 1] += sum(min(c, r[g]) for g, c in h.items())
            totals[n - 1] += max(len(hyp) - n + 1, 0)

    precisions = []
    for m, t in zip(matches, totals):
        if t == 0:
            precisions.append(1.0)
        elif m == 0 and smoothing == "add-1":
            precisions.append(1.0 / (t + 1))
        else:
            precisions.append(m / t)

    if hyp_len == 0:
        bp = 0.0
    elif hyp_len < ref_len:
        bp = math.exp(1 - ref_len / hyp_len)
    else:
        bp = 1.0

    if bp == 0.0 or min(precisions) == 0.0:
        score = 0.0
    else:
        score = 100 * bp * math.exp(sum(math.log(p) for p in precisions) / max_n)
    return BleuReport(score, tuple(precisions), bp, hyp_len, ref_len, tuple(matches), tuple(totals))


def read_tokenized(path) -> list[list[str]]:
    with open(path, encoding="utf-8") as f:
        return [line.split() for line in f]
