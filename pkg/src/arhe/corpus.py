"""Parallel corpus ingestion, seeded train/test split and cognate coverage."""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .prng import Xoshiro256
from .translit import TransliterationTable, transliterate
from .wordpiece import pretokenize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParallelCorpus:
    pairs: tuple[tuple[str, str], ...]
    source_lang: str = "ar"
    target_lang: str = "he"

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((s, t) for s, t in self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)


def read_tsv(path, source_lang: str = "ar", target_lang: str = "he") -> ParallelCorpus:
    pairs = []
    with open(path, encoding="utf-8", newline="") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 tab-separated columns, got {len(parts)}")
            pairs.append((parts[0], parts[1]))
    return ParallelCorpus(tuple(pairs), source_lang, target_lang)


def read_aligned(src_path, tgt_path, source_lang: str = "ar", target_lang: str = "he") -> ParallelCorpus:
    src = Path(src_path).read_text(encoding="utf-8").splitlines()
    tgt = Path(tgt_path).read_text(encoding="utf-8").splitlines()
    if len(src) != len(tgt):
        raise ValueError(f"{src_path} has {len(src)} lines but {tgt_path} has {len(tgt)}")
    return ParallelCorpus(tuple(zip(src, tgt)), source_lang, target_lang)


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        # repr round-trips, so 0.8 becomes exactly 4/5
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: Fraction = Fraction(4, 5)
    seed: int = 42

    def __post_init__(self):
        frac = _as_fraction(self.train_fraction)
        if not 0 < frac < 1:
            raise ValueError(f"train_fraction must lie strictly between 0 and 1, got {self.train_fraction}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        object.__setattr__(self, "train_fraction", frac)


def split_indices(n: int, spec: SplitSpec = SplitSpec()) -> tuple[list[int], list[int]]:
    """Shuffle ``range(n)`` with the seeded PRNG and cut at floor(n * fraction)."""
    if n <= 0:
        raise ValueError("cannot split an empty corpus")
    order = list(range(n))
    Xoshiro256(spec.seed).shuffle(order)
    n_train = math.floor(n * spec.train_fraction)
    if n_train == 0:
        log.warning("corpus of %d pair(s) too small for fraction %s; putting everything in train",
                    n, spec.train_fraction)
        n_train = n
    return order[:n_train], order[n_train:]


def split(corpus: ParallelCorpus, spec: SplitSpec = SplitSpec()) -> tuple[ParallelCorpus, ParallelCorpus]:
    train_idx, test_idx = split_indices(len(corpus), spec)
    pairs = corpus.pairs
    mk = lambda idx: ParallelCorpus(tuple(pairs[i] for i in idx), corpus.source_lang, corpus.target_lang)
    return mk(train_idx), mk(test_idx)


@dataclass(frozen=True)
class CognateLexicon:
    entries: frozenset  # of (hebrew_form, is_authentic)

    def forms(self, authentic_only: bool = False) -> set[str]:
        return {f for f, auth in self.entries if auth or not authentic_only}


def read_lexicon(path, table: TransliterationTable | None = None) -> CognateLexicon:
    """Lexicon TSV: ``form[<TAB>authentic]`` with authentic in {0,1,true,false}.

    Forms are run through the transliterator so Arabic-script entries land in
    Hebrew script too.
    """
    entries = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        form = transliterate(parts[0].strip(), table)
        flag = parts[1].strip().lower() if len(parts) > 1 else "1"
        if flag not in ("0", "1", "true", "false"):
            raise ValueError(f"{path}:{lineno}: bad authenticity flag {parts[1]!r}")
        if not form or any(ch.isspace() for ch in form):
            raise ValueError(f"{path}:{lineno}: form must be a single non-empty word")
        entries.add((form, flag in ("1", "true")))
    return CognateLexicon(frozenset(entries))


@dataclass
class CoverageReport:
    pairs_total: int
    pairs_with_cognate: int
    per_form: dict[str, int] = field(default_factory=dict)

    @property
    def fraction(self) -> float:
        return self.pairs_with_cognate / self.pairs_total if self.pairs_total else 0.0

    @property
    def empty(self) -> bool:
        return self.pairs_total == 0

    def as_dict(self) -> dict:
        return {
            "pairs_total": self.pairs_total,
            "pairs_with_cognate": self.pairs_with_cognate,
            "fraction": self.fraction,
            "empty_corpus": self.empty,
            "per_form": dict(sorted(self.per_form.items())),
        }


def cognate_coverage(corpus: ParallelCorpus | Iterable[tuple[str, str]], lexicon: CognateLexicon,
                     table: TransliterationTable | None = None,
                     authentic_only: bool = False) -> CoverageReport:
    """Count pairs where some lexicon form is a whole word on both sides.

    The Arabic side is transliterated first; with a ``ParallelCorpus`` the
    side tagged ``ar`` is used (source by default).
    """
    forms = lexicon.forms(authentic_only)
    if not lexicon.entries:
        raise ValueError("cognate lexicon is empty")
    arabic_first = True
    if isinstance(corpus, ParallelCorpus):
        arabic_first = corpus.target_lang != "ar"
        corpus = corpus.pairs
    total = hits = 0
    per_form: Counter = Counter()
    for a, b in corpus:
        ar, he = (a, b) if arabic_first else (b, a)
        shared = set(pretokenize(transliterate(ar, table))) & set(pretokenize(he)) & forms
        total += 1
        if shared:
            hits += 1
            per_form.update(shared)
    return CoverageReport(total, hits, dict(per_form))
