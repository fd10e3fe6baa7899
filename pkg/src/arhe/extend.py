"""Extended-tokenizer (ET) aliases for an existing Arabic vocabulary.

Each Arabic token gets a Hebrew-script alias that resolves to the original
token id. The base vocabulary is never modified; aliases live in a sidecar
TSV file.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .translit import TransliterationTable, TranslitOptions, DEFAULT_OPTIONS, transliterate
from .wordpiece import SubwordVocab, encode_words, pretokenize

_ARABIC_RANGES = ((0x0600, 0x06FF), (0x0750, 0x077F), (0x08A0, 0x08FF),
                  (0xFB50, 0xFDFF), (0xFE70, 0xFEFF))


def has_arabic(text: str) -> bool:
    return any(lo <= ord(ch) <= hi for ch in text for lo, hi in _ARABIC_RANGES)


class Collision(NamedTuple):
    surface: str
    kept_id: int
    dropped_id: int


@dataclass(frozen=True)
class ExtendedVocab:
    base: SubwordVocab
    aliases: dict[str, int]
    collision_log: tuple[Collision, ...] = ()
    _lookup: dict = field(init=False, repr=False, compare=False)
    _max_len: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.base)
        for surface, i in self.aliases.items():
            if not 0 <= i < n:
                raise ValueError(f"alias {surface!r} points at id {i}, outside the base vocab")
            if surface in self.base:
                raise ValueError(f"alias {surface!r} shadows a base token")
        lookup = dict(self.aliases)
        lookup.update(self.base._index)
        object.__setattr__(self, "_lookup", lookup)
        object.__setattr__(self, "_max_len", max([self.base._max_len] + [len(s) for s in self.aliases]))

    def lookup(self, surface: str) -> int | None:
        return self._lookup.get(surface)

    def dumps(self) -> str:
        lines = [f"# collision\t{c.surface}\t{c.kept_id}\t{c.dropped_id}\n" for c in self.collision_log]
        lines += [f"{s}\t{i}\n" for s, i in sorted(self.aliases.items(), key=lambda kv: (kv[1], kv[0]))]
        return "".join(lines)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, base: SubwordVocab, path) -> "ExtendedVocab":
        aliases: dict[str, int] = {}
        collisions = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            # "##" starts a subword alias, so comments need "# "
            if line.startswith("# ") or line == "#":
                if parts[0] == "# collision" and len(parts) == 4:
                    collisions.append(Collision(parts[1], int(parts[2]), int(parts[3])))
                continue
            if len(parts) != 2 or not parts[1].isdigit():
                raise ValueError(f"{path}:{lineno}: expected 'surface<TAB>id', got {line!r}")
            if parts[0] in aliases:
                raise ValueError(f"{path}:{lineno}: duplicate alias {parts[0]!r}")
            aliases[parts[0]] = int(parts[1])
        return cls(base, aliases, tuple(collisions))


def extend(base: SubwordVocab, table: TransliterationTable,
           opts: TranslitOptions = DEFAULT_OPTIONS) -> ExtendedVocab:
    prefix = base.continuing_prefix
    aliases: dict[str, int] = {}
    collisions: list[Collision] = []
    for i, surface in enumerate(base.tokens):
        if not has_arabic(surface):
            continue
        if surface.startswith(prefix) and len(surface) > len(prefix):
            alias = prefix + transliterate(surface[len(prefix):], table, opts)
        else:
            alias = transliterate(surface, table, opts)
        if alias == surface:
            continue
        owner = base.id_of(alias)
        if owner is None:
            owner = aliases.get(alias)
        if owner is not None:
            collisions.append(Collision(alias, owner, i))
            continue
        aliases[alias] = i
    return ExtendedVocab(base, aliases, tuple(collisions))


def encode_extended(text: str, ev: ExtendedVocab) -> list[int]:
    """WordPiece encoding that also matches alias surfaces; emits base ids only."""
    base = ev.base
    return encode_words(pretokenize(text), ev._lookup, base.continuing_prefix,
                        ev._max_len, base.max_word_chars)
