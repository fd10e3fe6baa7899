import itertools

import pytest

from arhe.extend import Collision, ExtendedVocab, encode_extended, extend
from arhe.translit import TransliterationTable, transliterate
from arhe.wordpiece import SPECIALS, SubwordVocab, encode

# injective, length-preserving toy map
TOY = TransliterationTable({"ب": "ב", "ت": "ת", "س": "ס", "ل": "ל"})
TOY_LETTERS = "بتسل"


def _vocab(*tokens):
    return SubwordVocab(SPECIALS + tuple(tokens))


def test_alias_resolves_to_original_id(table):
    filler = [f"w{i}" for i in range(123 - len(SPECIALS))]
    base = _vocab(*filler, "كتاب")
    assert base.id_of("كتاب") == 123
    ev = extend(base, table)
    assert ev.lookup("כתאב") == 123
    assert ev.aliases == {"כתאב": 123}


def test_no_arabic_tokens(table):
    ev = extend(_vocab("שלום", "abc", "##x"), table)
    assert ev.aliases == {}
    assert ev.collision_log == ()


def test_collision_lowest_id_wins(table):
    # teh marbuta and heh share a rendering; the tashkeel is stripped anyway
    base = _vocab("a", "b", "مدرسة", "مدرسهَ")
    ev = extend(base, table)
    assert ev.aliases == {"מדרסה": 7}
    assert ev.collision_log == (Collision("מדרסה", 7, 8),)


def test_hand_enumerated_collisions(table):
    # every pair of table keys that share a replacement collides as single-letter tokens
    keys = sorted(table.entries)
    base = _vocab(*keys)
    ev = extend(base, table)
    by_rep = {}
    for k in keys:
        by_rep.setdefault(table.entries[k], []).append(base.id_of(k))
    expected_aliases = {rep: ids[0] for rep, ids in by_rep.items()}
    expected_log = sorted(Collision(rep, ids[0], j) for rep, ids in by_rep.items() for j in ids[1:])
    assert ev.aliases == expected_aliases
    assert sorted(ev.collision_log) == expected_log


def test_base_surface_never_aliased(table):
    base = _vocab("סלאמ", "سلام")
    ev = extend(base, table)
    assert ev.aliases == {}
    assert ev.collision_log == (Collision("סלאמ", 5, 6),)
    assert ev.lookup("סלאמ") == 5


def test_continuing_prefix_preserved(table):
    base = _vocab("كتب", "##ون")
    ev = extend(base, table)
    assert ev.aliases == {"כתב": 5, "##ונ": 6}


def test_id_conservation_and_soundness(table):
    base = _vocab("سلام", "##ات", "ال", "##ة", "bread", "##ه")
    ev = extend(base, table)
    assert max(ev.aliases.values()) < len(base)
    assert len(ev.base) == len(base)
    for surface, i in ev.aliases.items():
        assert transliterate(base.tokens[i], table) == surface


def test_encode_hebrew_alias(table):
    base = _vocab("سلام", "عليكم")
    ev = extend(base, table)
    assert encode_extended("סלאמ עליכמ", ev) == [5, 6]


def test_arabic_input_matches_base(table):
    base = _vocab("سلام", "س", "##ل", "##ا", "##م")
    ev = extend(base, table)
    for text in ["سلام", "سلم", "سام ملا", "x"]:
        assert encode_extended(text, ev) == encode(text, base)


def test_exhaustive_toy_equivalence():
    tokens = ["ب", "ت", "س", "ل", "##ب", "##ت", "##س", "##ل", "بت", "##سل", "سلب", "##تب", "لل"]
    base = _vocab(*tokens)
    ev = extend(base, TOY)
    checked = 0
    for n in range(1, 5):
        for letters in itertools.product(TOY_LETTERS, repeat=n):
            w = "".join(letters)
            ids = encode(w, base)
            if 1 in ids:
                continue
            assert encode_extended(transliterate(w, TOY), ev) == ids
            checked += 1
    assert checked == sum(4 ** n for n in range(1, 5))


def test_sidecar_round_trip(table, tmp_path):
    base = _vocab("a", "b", "مدرسة", "مدرسه", "##ين")
    ev = extend(base, table)
    p = tmp_path / "aliases.tsv"
    ev.save(p)
    text = p.read_text("utf-8")
    assert "# collision\tמדרסה\t7\t8\n" in text
    loaded = ExtendedVocab.load(base, p)
    assert loaded.aliases == ev.aliases
    assert loaded.collision_log == ev.collision_log


def test_sidecar_rejects_bad_ids(tmp_path):
    base = _vocab("a")
    p = tmp_path / "aliases.tsv"
    p.write_text("x\t99\n", "utf-8")
    with pytest.raises(ValueError):
        ExtendedVocab.load(base, p)
    p.write_text("a\t5\n", "utf-8")
    with pytest.raises(ValueError, match="shadows"):
        ExtendedVocab.load(base, p)
