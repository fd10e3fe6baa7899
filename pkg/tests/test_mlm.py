import io
import math
import random

import pytest

from arhe.mlm import IGNORE, MlmStats, prepare_mlm, read_records, write_binary, write_jsonl
from arhe.wordpiece import CLS_ID, MASK_ID, SEP_ID, SPECIALS, TrainerConfig, count_words, encode, train


@pytest.fixture(scope="module")
def corpus():
    rng = random.Random(0)
    words = ["שלום", "עולם", "סלאמ", "ספר", "בית", "ילד", "כתאב", "מדרסה", "חקוק", "עבודה"]
    return [" ".join(rng.choice(words) for _ in range(rng.randint(1, 30))) for _ in range(400)]


@pytest.fixture(scope="module")
def vocab(corpus):
    return train(count_words(corpus), TrainerConfig(vocab_size_limit=60, alphabet_limit=30))


def test_zero_prob(corpus, vocab):
    for ex in prepare_mlm(corpus[:50], vocab, mask_prob=0):
        assert ex.mask_positions == ()
        assert set(ex.labels) == {IGNORE}


def test_full_prob_without_replacement_rule(corpus, vocab):
    for ex in prepare_mlm(corpus[:50], vocab, mask_prob=1, mask_token_prob=1.0, random_token_prob=0.0):
        inner = range(1, len(ex.input_ids) - 1)
        assert list(ex.mask_positions) == list(inner)
        assert all(ex.input_ids[i] == MASK_ID for i in inner)
        assert ex.input_ids[0] == CLS_ID and ex.input_ids[-1] == SEP_ID


def test_wrapping_and_truncation(corpus, vocab):
    for ex, line in zip(prepare_mlm(corpus, vocab, mask_prob=0, max_sequence_length=8), corpus):
        ids = encode(line, vocab)
        assert len(ex.input_ids) <= 8
        assert list(ex.input_ids) == [CLS_ID, *ids[:6], SEP_ID]


def test_label_soundness(corpus, vocab):
    for ex, line in zip(prepare_mlm(corpus, vocab, mask_prob=0.3, seed=1), corpus):
        original = [CLS_ID, *encode(line, vocab)[:510], SEP_ID]
        restored = list(ex.input_ids)
        for pos in ex.mask_positions:
            restored[pos] = ex.labels[pos]
        assert restored == original
        assert [i for i, lab in enumerate(ex.labels) if lab != IGNORE] == list(ex.mask_positions)


def test_specials_never_selected(vocab):
    lines = ["שלום xx עולם", "?? ספר", "ספר"] * 200
    for ex in prepare_mlm(lines, vocab, mask_prob=0.9, seed=3):
        original = [CLS_ID, *encode(lines[ex.line_index], vocab), SEP_ID]
        for pos in ex.mask_positions:
            assert original[pos] >= len(SPECIALS)


def test_empty_lines_skipped(vocab):
    stats = MlmStats()
    out = list(prepare_mlm(["ספר", "", "   ", "בית"], vocab, stats=stats))
    assert [ex.line_index for ex in out] == [0, 3]
    assert stats.skipped_empty == 2 and stats.lines == 4


def test_deterministic_and_shard_independent(corpus, vocab):
    a = list(prepare_mlm(corpus, vocab, seed=42))
    b = list(prepare_mlm(corpus, vocab, seed=42))
    assert a == b
    half = len(corpus) // 2
    sharded = list(prepare_mlm(corpus[:half], vocab, seed=42)) + \
        list(prepare_mlm(corpus[half:], vocab, seed=42, first_index=half))
    assert sharded == a
    assert list(prepare_mlm(corpus, vocab, seed=43)) != a


def test_selection_rate(corpus, vocab):
    stats = MlmStats()
    lines = corpus * 20
    for _ in prepare_mlm(lines, vocab, mask_prob=0.15, seed=5, stats=stats):
        pass
    assert stats.candidates >= 100_000
    rate = stats.selected / stats.candidates
    sigma = math.sqrt(0.15 * 0.85 / stats.candidates)
    assert abs(rate - 0.15) < 0.01
    assert abs(rate - 0.15) < 3 * sigma


def test_replacement_split(corpus, vocab):
    masked = rand = kept = 0
    for ex in prepare_mlm(corpus * 5, vocab, mask_prob=0.5, seed=11):
        for pos in ex.mask_positions:
            if ex.input_ids[pos] == MASK_ID:
                masked += 1
            elif ex.input_ids[pos] == ex.labels[pos]:
                kept += 1
            else:
                rand += 1
                assert len(SPECIALS) <= ex.input_ids[pos] < len(vocab)
    total = masked + rand + kept
    assert abs(masked / total - 0.8) < 0.02
    # a random draw can hit the original id, so "kept" is slightly inflated
    assert abs(rand / total - 0.1) < 0.02
    assert abs(kept / total - 0.1) < 0.02


def test_binary_round_trip(corpus, vocab):
    examples = list(prepare_mlm(corpus[:30], vocab, seed=2))
    buf = io.BytesIO()
    assert write_binary(examples, buf) == 30
    buf.seek(0)
    back = list(read_records(buf))
    assert [(e.input_ids, e.labels, e.mask_positions) for e in back] == \
        [(e.input_ids, e.labels, e.mask_positions) for e in examples]


def test_jsonl(corpus, vocab):
    buf = io.StringIO()
    write_jsonl(prepare_mlm(corpus[:3], vocab, seed=2), buf)
    first = buf.getvalue().splitlines()[0]
    assert first.startswith('{"input_ids":[2,')


@pytest.mark.parametrize("kwargs", [dict(mask_prob=1.5), dict(mask_prob=-0.1), dict(max_sequence_length=2),
                                    dict(mask_token_prob=0.95, random_token_prob=0.1)])
def test_argument_validation(vocab, kwargs):
    with pytest.raises(ValueError):
        list(prepare_mlm(["ספר"], vocab, **kwargs))
