"""Masked-language-model example preparation (no next-sentence pairs).

Every line gets its own PRNG seeded from ``(seed, line_index)``, so output
does not depend on how lines are sharded across workers.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, TextIO

from .prng import Xoshiro256, derive_seed
from .wordpiece import CLS_ID, MASK_ID, SEP_ID, SPECIALS, SubwordVocab, encode

IGNORE = -100


@dataclass(frozen=True)
class MaskedExample:
    input_ids: tuple[int, ...]
    labels: tuple[int, ...]
    mask_positions: tuple[int, ...]
    line_index: int = -1

    def to_json(self) -> str:
        return json.dumps({"input_ids": list(self.input_ids), "labels": list(self.labels),
                           "mask_positions": list(self.mask_positions)}, separators=(",", ":"))

    def to_bytes(self) -> bytes:
        """``<u32 n><n x i32 input_ids><n x i32 labels><u32 m><m x u32 positions>``, little-endian."""
        n, m = len(self.input_ids), len(self.mask_positions)
        return b"".join((
            struct.pack(f"<I{n}i", n, *self.input_ids),
            struct.pack(f"<{n}i", *self.labels),
            struct.pack(f"<I{m}I", m, *self.mask_positions),
        ))


def read_records(stream: BinaryIO) -> Iterator[MaskedExample]:
    """Inverse of ``MaskedExample.to_bytes`` over a concatenated shard."""
    while True:
        head = stream.read(4)
        if not head:
            return
        (n,) = struct.unpack("<I", head)
        ids = struct.unpack(f"<{n}i", stream.read(4 * n))
        labels = struct.unpack(f"<{n}i", stream.read(4 * n))
        (m,) = struct.unpack("<I", stream.read(4))
        pos = struct.unpack(f"<{m}I", stream.read(4 * m))
        yield MaskedExample(ids, labels, pos)


@dataclass
class MlmStats:
    lines: int = 0
    skipped_empty: int = 0
    examples: int = 0
    candidates: int = 0
    selected: int = 0


def mask_sequence(ids: list[int], vocab_size: int, rng: Xoshiro256, mask_prob: float = 0.15,
                  mask_token_prob: float = 0.8, random_token_prob: float = 0.1):
    """Select and corrupt positions of an already-wrapped sequence.

    Returns ``(corrupted_ids, labels, positions)``. Ids below 5 are specials and
    are never selected.
    """
    n_special = len(SPECIALS)
    out = list(ids)
    labels = [IGNORE] * len(ids)
    positions = []
    for pos, tok in enumerate(ids):
        if tok < n_special:
            continue
        if rng.random() >= mask_prob:
            continue
        positions.append(pos)
        labels[pos] = tok
        r = rng.random()
        if r < mask_token_prob:
            out[pos] = MASK_ID
        elif r < mask_token_prob + random_token_prob and vocab_size > n_special:
            out[pos] = n_special + rng.below(vocab_size - n_special)
    return out, labels, positions


def prepare_mlm(lines: Iterable[str], vocab: SubwordVocab, mask_prob: float = 0.15,
                max_sequence_length: int = 512, seed: int = 42, *,
                mask_token_prob: float = 0.8, random_token_prob: float = 0.1,
                first_index: int = 0, stats: MlmStats | None = None) -> Iterator[MaskedExample]:
    """Yield one masked example per non-empty line.

    Pass ``first_index`` when feeding a slice of a larger input so line
    seeds stay tied to global line numbers.
    """
    if not 0 <= mask_prob <= 1:
        raise ValueError("mask_prob must lie in [0, 1]")
    if max_sequence_length < 3:
        raise ValueError("max_sequence_length must leave room for [CLS], one token and [SEP]")
    if mask_token_prob < 0 or random_token_prob < 0 or mask_token_prob + random_token_prob > 1:
        raise ValueError("replacement probabilities must be non-negative and sum to at most 1")
    stats = stats if stats is not None else MlmStats()
    for index, line in enumerate(lines, start=first_index):
        stats.lines += 1
        ids = encode(line, vocab)
        if not ids:
            stats.skipped_empty += 1
            continue
        ids = [CLS_ID, *ids[: max_sequence_length - 2], SEP_ID]
        rng = Xoshiro256(derive_seed(seed, index))
        out, labels, positions = mask_sequence(ids, len(vocab), rng, mask_prob,
                                               mask_token_prob, random_token_prob)
        stats.examples += 1
        stats.candidates += sum(1 for t in ids if t >= len(SPECIALS))
        stats.selected += len(positions)
        yield MaskedExample(tuple(out), tuple(labels), tuple(positions), index)


def write_jsonl(examples: Iterable[MaskedExample], sink: TextIO) -> int:
    n = 0
    for ex in examples:
        sink.write(ex.to_json() + "\n")
        n += 1
    return n


def write_binary(examples: Iterable[MaskedExample], sink: BinaryIO) -> int:
    n = 0
    for ex in examples:
        sink.write(ex.to_bytes())
        n += 1
    return n
