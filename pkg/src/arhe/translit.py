"""Letter-by-letter Arabic to Hebrew transliteration.

Only codepoints listed in the mapping table are rewritten. Everything else,
including Arabic-Indic digits and punctuation, passes through untouched.
Word-final Hebrew letter forms are never produced.
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import BinaryIO, Mapping, TextIO

HEBREW_FINALS = frozenset("ךםןףץ")
GERESH = "׳"
# geresh proper and the ASCII apostrophe some charts use instead
_DISAMBIGUATION_MARKS = frozenset((GERESH, "'"))
# tashkeel, Quranic marks and superscript alef
ARABIC_MARKS = frozenset([chr(c) for c in range(0x064B, 0x0660)] + ["ٰ"])

_ROW_RE = re.compile(r"^([0-9A-Fa-f]{4,6})\t(\S+)$")


class TableError(ValueError):
    """Raised when a mapping file fails validation."""

    def __init__(self, path, lineno: int, message: str):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


class StreamDecodeError(ValueError):
    def __init__(self, lineno: int, offset: int, reason: str):
        self.lineno = lineno
        self.offset = offset
        super().__init__(f"undecodable input at byte offset {offset} (line {lineno}): {reason}")


def is_arabic_letter(ch: str) -> bool:
    cp = ord(ch)
    return 0x0600 <= cp <= 0x06FF and unicodedata.category(ch) == "Lo"


def _is_hebrew_letter(ch: str) -> bool:
    return 0x05D0 <= ord(ch) <= 0x05EA


@dataclass(frozen=True)
class TransliterationTable:
    entries: Mapping[str, str]
    version: str = ""
    _translation: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.entries:
            raise ValueError("transliteration table is empty")
        for key, rep in self.entries.items():
            _check_entry(key, rep)
        object.__setattr__(self, "entries", dict(self.entries))
        object.__setattr__(self, "_translation", {ord(k): v for k, v in self.entries.items()})

    def __contains__(self, ch: str) -> bool:
        return ch in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def _check_entry(key: str, rep: str) -> None:
    if len(key) != 1 or not is_arabic_letter(key):
        raise ValueError(f"key U+{ord(key[0]):04X} is not an Arabic letter" if key else "empty key")
    if not rep:
        raise ValueError("empty replacement")
    if any(ch in HEBREW_FINALS for ch in rep):
        raise ValueError(f"final-form letter in replacement {rep!r}")
    if not all(_is_hebrew_letter(ch) or ch in _DISAMBIGUATION_MARKS for ch in rep):
        raise ValueError(f"replacement {rep!r} must contain only Hebrew letters and geresh")
    if not _is_hebrew_letter(rep[0]):
        raise ValueError(f"replacement {rep!r} must start with a Hebrew letter")


@dataclass(frozen=True)
class TranslitOptions:
    strip_arabic_diacritics: bool = True
    normalize_unicode: bool = True


DEFAULT_OPTIONS = TranslitOptions()


def load_table(path) -> TransliterationTable:
    """Read and validate a TSV mapping file.

    Rows are ``<hex codepoint>\\t<replacement>``; ``#`` starts a comment line.
    A ``# version: ...`` comment sets the table's provenance string.
    """
    entries: dict[str, str] = {}
    seen_at: dict[str, int] = {}
    version = ""
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.lower().startswith("version:") and not version:
                version = body.split(":", 1)[1].strip()
            continue
        m = _ROW_RE.match(line)
        if m is None:
            raise TableError(path, lineno, f"malformed row {line!r}")
        cp = int(m.group(1), 16)
        if cp > 0x10FFFF:
            raise TableError(path, lineno, f"codepoint {m.group(1)} out of range")
        key, rep = chr(cp), m.group(2)
        if key in entries:
            raise TableError(path, lineno, f"duplicate key {m.group(1)} (first defined on line {seen_at[key]})")
        try:
            _check_entry(key, rep)
        except ValueError as exc:
            raise TableError(path, lineno, str(exc)) from None
        entries[key] = rep
        seen_at[key] = lineno
    if not entries:
        raise TableError(path, 0, "no mapping rows")
    return TransliterationTable(entries, version)


def default_table_path() -> Path:
    return Path(str(resources.files("arhe").joinpath("data", "ar2he.tsv")))


_default_table: TransliterationTable | None = None


def default_table() -> TransliterationTable:
    global _default_table
    if _default_table is None:
        _default_table = load_table(default_table_path())
    return _default_table


_STRIP_MARKS = {ord(c): None for c in ARABIC_MARKS}


def transliterate(text: str, table: TransliterationTable | None = None,
                  opts: TranslitOptions = DEFAULT_OPTIONS) -> str:
    if table is None:
        table = default_table()
    if opts.normalize_unicode:
        text = unicodedata.normalize("NFC", text)
    if opts.strip_arabic_diacritics:
        text = text.translate(_STRIP_MARKS)
    out = text.translate(table._translation)
    if opts.normalize_unicode and opts.strip_arabic_diacritics and not out.isascii():
        # dropping a mark can leave a newly composable sequence behind
        out = unicodedata.normalize("NFC", out)
    return out


def transliterate_stream(source: BinaryIO, sink: TextIO, table: TransliterationTable | None = None,
                         opts: TranslitOptions = DEFAULT_OPTIONS, lossy: bool = False) -> int:
    """Transliterate ``source`` line by line into ``sink``; returns the line count.

    Bytes are decoded strictly unless ``lossy`` is set, in which case bad
    sequences become U+FFFD.
    """
    if table is None:
        table = default_table()
    errors = "replace" if lossy else "strict"
    offset = 0
    count = 0
    for raw in source:
        try:
            line = raw.decode("utf-8", errors)
        except UnicodeDecodeError as exc:
            raise StreamDecodeError(count + 1, offset + exc.start, exc.reason) from None
        sink.write(transliterate(line, table, opts))
        offset += len(raw)
        count += 1
    return count
