"""WordPiece vocabulary training, encoding and decoding.

Training follows the likelihood merge rule: at each step the adjacent
symbol pair with the highest ``pair_count / (left_count * right_count)``
is merged. Ties go to the lexicographically smallest merged surface.
"""
from __future__ import annotations

import heapq
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Mapping

PAD, UNK, CLS, SEP, MASK = "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"
SPECIALS = (PAD, UNK, CLS, SEP, MASK)
PAD_ID, UNK_ID, CLS_ID, SEP_ID, MASK_ID = range(5)

# geresh and gershayim are letter modifiers in Hebrew script, not punctuation
_LETTER_MARKS = frozenset("׳״")


@lru_cache(maxsize=None)
def is_punctuation(ch: str) -> bool:
    if ch in _LETTER_MARKS:
        return False
    cp = ord(ch)
    if 33 <= cp <= 47 or 58 <= cp <= 64 or 91 <= cp <= 96 or 123 <= cp <= 126:
        return True
    return unicodedata.category(ch).startswith("P")


def pretokenize(text: str) -> list[str]:
    """Split on whitespace and isolate every punctuation character."""
    words: list[str] = []
    for chunk in text.split():
        start = 0
        for i, ch in enumerate(chunk):
            if is_punctuation(ch):
                if i > start:
                    words.append(chunk[start:i])
                words.append(ch)
                start = i + 1
        if start < len(chunk):
            words.append(chunk[start:])
    return words


@dataclass(frozen=True)
class SubwordVocab:
    tokens: tuple[str, ...]
    continuing_prefix: str = "##"
    max_word_chars: int = 100
    _index: dict = field(init=False, repr=False, compare=False)
    _max_len: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tokens = tuple(self.tokens)
        object.__setattr__(self, "tokens", tokens)
        if tokens[:5] != SPECIALS:
            raise ValueError(f"vocab must start with {', '.join(SPECIALS)}")
        index = {}
        for i, tok in enumerate(tokens):
            if not tok or any(c.isspace() for c in tok):
                raise ValueError(f"invalid token surface {tok!r} at id {i}")
            if tok in index:
                raise ValueError(f"duplicate token {tok!r} at ids {index[tok]} and {i}")
            index[tok] = i
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_max_len", max(len(t) for t in tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, surface: str) -> bool:
        return surface in self._index

    def id_of(self, surface: str) -> int | None:
        return self._index.get(surface)

    @classmethod
    def load(cls, path, continuing_prefix: str = "##") -> "SubwordVocab":
        text = Path(path).read_text(encoding="utf-8")
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        return cls(tuple(line.rstrip("\r") for line in lines), continuing_prefix)

    def dumps(self) -> str:
        return "".join(tok + "\n" for tok in self.tokens)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")


def _segment(word: str, lookup: Mapping[str, int], prefix: str, max_len: int) -> list[int] | None:
    ids = []
    start, n = 0, len(word)
    while start < n:
        end = min(n, start + max_len)
        piece_id = None
        while end > start:
            piece = word[start:end]
            if start > 0:
                piece = prefix + piece
            piece_id = lookup.get(piece)
            if piece_id is not None:
                break
            end -= 1
        if piece_id is None:
            return None
        ids.append(piece_id)
        start = end
    return ids


def encode_words(words: Iterable[str], lookup: Mapping[str, int], prefix: str,
                 max_len: int, max_word_chars: int) -> list[int]:
    out: list[int] = []
    for word in words:
        ids = None
        if len(word) <= max_word_chars:
            ids = _segment(word, lookup, prefix, max_len)
        if ids is None:
            out.append(UNK_ID)
        else:
            out.extend(ids)
    return out


def encode(text: str, vocab: SubwordVocab) -> list[int]:
    """Greedy longest-prefix WordPiece encoding; no [CLS]/[SEP] added."""
    return encode_words(pretokenize(text), vocab._index, vocab.continuing_prefix,
                        vocab._max_len, vocab.max_word_chars)


def wrap(ids: list[int]) -> list[int]:
    return [CLS_ID, *ids, SEP_ID]


def decode(ids: Iterable[int], vocab: SubwordVocab) -> str:
    prefix = vocab.continuing_prefix
    parts: list[str] = []
    for i in ids:
        if not 0 <= i < len(vocab.tokens):
            raise IndexError(f"token id {i} out of range for vocab of size {len(vocab.tokens)}")
        if i < len(SPECIALS) and i != UNK_ID:
            continue
        tok = vocab.tokens[i]
        if parts and i >= len(SPECIALS) and tok.startswith(prefix) and len(tok) > len(prefix):
            parts[-1] += tok[len(prefix):]
        else:
            parts.append(tok)
    return " ".join(parts)


@dataclass(frozen=True)
class TrainerConfig:
    vocab_size_limit: int = 30000
    alphabet_limit: int = 100
    min_pair_frequency: int = 2
    max_word_chars: int = 100
    continuing_prefix: str = "##"

    def __post_init__(self):
        for name in ("vocab_size_limit", "alphabet_limit", "min_pair_frequency", "max_word_chars"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.vocab_size_limit <= self.alphabet_limit + len(SPECIALS):
            raise ValueError("vocab_size_limit must exceed alphabet_limit + 5")
        if not self.continuing_prefix:
            raise ValueError("continuing_prefix must be non-empty")


def count_words(lines: Iterable[str]) -> Counter:
    counts: Counter = Counter()
    for line in lines:
        counts.update(pretokenize(line))
    return counts


def select_alphabet(word_counts: Mapping[str, int], limit: int) -> list[str]:
    """The ``limit`` most frequent characters, ties by ascending codepoint."""
    freq: Counter = Counter()
    for word, count in word_counts.items():
        for ch, k in Counter(word).items():
            freq[ch] += k * count
    return sorted(freq, key=lambda ch: (-freq[ch], ord(ch)))[:limit]


def train(corpus: Mapping[str, int] | Iterable[tuple[str, int]], cfg: TrainerConfig = TrainerConfig()) -> SubwordVocab:
    return train_with_merges(corpus, cfg)[0]


def train_with_merges(corpus, cfg: TrainerConfig = TrainerConfig()) -> tuple[SubwordVocab, list[tuple[str, str]]]:
    """Train a vocabulary; also return the merge sequence in order."""
    word_counts = _collect(corpus)
    if not word_counts:
        raise ValueError("cannot train on an empty corpus")
    prefix = cfg.continuing_prefix
    limit = cfg.vocab_size_limit

    alphabet = select_alphabet(word_counts, cfg.alphabet_limit)
    allowed = set(alphabet)
    kept = sorted(w for w in word_counts
                  if len(w) <= cfg.max_word_chars and all(ch in allowed for ch in w))

    tokens = list(SPECIALS) + alphabet
    inner: Counter = Counter()
    for w in kept:
        for ch in w[1:]:
            inner[ch] += word_counts[w]
    for ch in sorted(inner, key=lambda c: (-inner[c], ord(c))):
        if len(tokens) >= limit:
            break
        tokens.append(prefix + ch)

    merges = _merge_loop(kept, word_counts, tokens, cfg)
    vocab = SubwordVocab(tuple(tokens), prefix, cfg.max_word_chars)
    return vocab, merges


def _collect(corpus) -> dict[str, int]:
    items = corpus.items() if isinstance(corpus, Mapping) else corpus
    out: dict[str, int] = {}
    for word, count in items:
        if count <= 0:
            raise ValueError(f"non-positive count {count} for {word!r}")
        if not word:
            continue
        out[word] = out.get(word, 0) + count
    return out


class _PairStats:
    """Incremental pair and symbol counts over the segmented training words."""

    def __init__(self, segs: list[list[str]], weights: list[int]):
        self.segs = segs
        self.weights = weights
        self.sym: Counter = Counter()
        self.pairs: Counter = Counter()
        self.where: dict[tuple[str, str], set[int]] = {}
        self.touching: dict[str, set[tuple[str, str]]] = {}
        for i in range(len(segs)):
            self._add(i)

    def _add(self, i: int, changed: set | None = None) -> None:
        seg, w = self.segs[i], self.weights[i]
        for s in seg:
            self.sym[s] += w
        for pair in zip(seg, seg[1:]):
            self.pairs[pair] += w
            self.where.setdefault(pair, set()).add(i)
            self.touching.setdefault(pair[0], set()).add(pair)
            self.touching.setdefault(pair[1], set()).add(pair)
            if changed is not None:
                changed.add(pair)

    def _remove(self, i: int, changed: set) -> None:
        seg, w = self.segs[i], self.weights[i]
        for s in seg:
            self.sym[s] -= w
        for pair in zip(seg, seg[1:]):
            self.pairs[pair] -= w
            self.where[pair].discard(i)
            changed.add(pair)

    def apply(self, a: str, b: str, merged: str) -> set[tuple[str, str]]:
        changed: set[tuple[str, str]] = set()
        for i in sorted(self.where.get((a, b), ())):
            self._remove(i, changed)
            seg = self.segs[i]
            out, j = [], 0
            while j < len(seg):
                if j + 1 < len(seg) and seg[j] == a and seg[j + 1] == b:
                    out.append(merged)
                    j += 2
                else:
                    out.append(seg[j])
                    j += 1
            self.segs[i] = out
            self._add(i, changed)
        for pair in changed:
            if self.pairs[pair] <= 0:
                del self.pairs[pair]
                self.where.pop(pair, None)
                for s in pair:
                    t = self.touching.get(s)
                    if t is not None:
                        t.discard(pair)
        return changed


def _merge_loop(words: list[str], word_counts: Mapping[str, int], tokens: list[str],
                cfg: TrainerConfig) -> list[tuple[str, str]]:
    prefix = cfg.continuing_prefix
    present = set(tokens)
    segs = [[w[0]] + [prefix + ch for ch in w[1:]] for w in words]
    # words whose symbols did not all make it into the vocab cannot take part
    usable = [i for i, s in enumerate(segs) if all(x in present for x in s)]
    stats = _PairStats([segs[i] for i in usable], [word_counts[words[i]] for i in usable])
    min_freq = cfg.min_pair_frequency
    heap: list = []

    def merged_surface(a: str, b: str) -> str:
        return a + b[len(prefix):]

    def push(pair) -> None:
        pc = stats.pairs.get(pair, 0)
        if pc < min_freq:
            return
        a, b = pair
        denom = stats.sym[a] * stats.sym[b]
        heapq.heappush(heap, (-pc / denom, merged_surface(a, b), a, b, pc, denom))

    def valid(entry) -> bool:
        _, _, a, b, pc, denom = entry
        return stats.pairs.get((a, b), 0) == pc and stats.sym[a] * stats.sym[b] == denom

    for pair in stats.pairs:
        push(pair)

    merges: list[tuple[str, str]] = []
    while len(tokens) < cfg.vocab_size_limit:
        best = None
        while heap:
            entry = heapq.heappop(heap)
            if valid(entry):
                best = entry
                break
        if best is None:
            break
        # float keys can tie for distinct rationals; settle those exactly
        ties = []
        while heap and heap[0][0] == best[0]:
            entry = heapq.heappop(heap)
            if valid(entry):
                ties.append(entry)
        if ties:
            cands = [best] + ties
            cands.sort(key=lambda e: (-Fraction(e[4], e[5]), e[1], e[2], e[3]))
            best = cands[0]
            for e in cands[1:]:
                heapq.heappush(heap, e)

        _, surface, a, b, _, _ = best
        merges.append((a, b))
        if surface not in present:
            present.add(surface)
            tokens.append(surface)
        changed = stats.apply(a, b, surface)
        affected = set(changed)
        for s in (a, b, surface):
            affected |= stats.touching.get(s, set())
        for pair in affected:
            push(pair)
    return merges


def iter_encoded(lines: Iterable[str], vocab: SubwordVocab) -> Iterator[list[int]]:
    for line in lines:
        yield encode(line, vocab)
