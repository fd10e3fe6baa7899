"""``arhe`` command line: one entry point, one subcommand per pipeline stage.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 I/O error.
Diagnostics go to stderr; data to stdout or ``--out``.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import itertools
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .bleu import corpus_bleu, read_tokenized
from .corpus import SplitSpec, cognate_coverage, read_aligned, read_lexicon, read_tsv, split
from .extend import ExtendedVocab, encode_extended, extend
from .mlm import MlmStats, prepare_mlm
from .translit import (TranslitOptions, default_table_path, load_table, transliterate,
                       transliterate_stream)
from .wordpiece import SubwordVocab, TrainerConfig, count_words, encode, train

log = logging.getLogger("arhe")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3

# share of Kol Zchut sentence pairs with a lexicon cognate, as originally reported
REFERENCE_COVERAGE = 0.5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")

    def exit(self, status=0, message=None):
        if message:
            sys.stderr.write(message)
        raise SystemExit(status)


@contextlib.contextmanager
def atomic_output(path, binary: bool = False):
    """Write to a temp file beside ``path`` and rename it into place on success."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb" if binary else "w", **({} if binary else {"encoding": "utf-8", "newline": ""})) as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


@contextlib.contextmanager
def _text_out(out):
    if out is None or out == "-":
        yield sys.stdout
    else:
        with atomic_output(out) as f:
            yield f


def _require_files(*paths):
    for p in paths:
        if p is not None and p != "-" and not Path(p).is_file():
            raise FileNotFoundError(f"no such file: {p}")


def _load_table(path):
    return load_table(path or default_table_path())


def _lines(paths):
    if not paths:
        yield from io.TextIOWrapper(sys.stdin.buffer, encoding="utf-8", newline="")
        return
    for p in paths:
        with open(p, encoding="utf-8", newline="") as f:
            yield from f


# -- subcommands -------------------------------------------------------------

def cmd_translit(args):
    _require_files(args.table, args.input)
    table = _load_table(args.table)
    opts = TranslitOptions(strip_arabic_diacritics=not args.keep_diacritics,
                           normalize_unicode=not args.no_nfc)
    src = sys.stdin.buffer if args.input in (None, "-") else open(args.input, "rb")
    try:
        with _text_out(args.out) as sink:
            n = transliterate_stream(src, sink, table, opts, lossy=args.lossy)
    finally:
        if src is not sys.stdin.buffer:
            src.close()
    log.info("transliterated %d lines", n)


def cmd_train(args):
    _require_files(*args.corpus)
    cfg = TrainerConfig(vocab_size_limit=args.vocab_size, alphabet_limit=args.alphabet,
                        min_pair_frequency=args.min_pair_frequency, max_word_chars=args.max_word_chars)
    counts = count_words(_lines(args.corpus))
    vocab = train(counts, cfg)
    with _text_out(args.out) as f:
        f.write(vocab.dumps())
    log.info("trained %d tokens from %d distinct words", len(vocab), len(counts))


def _tokenizer(args):
    _require_files(args.vocab, args.aliases, args.table)
    vocab = SubwordVocab.load(args.vocab)
    table = _load_table(args.table) if args.table else None
    if args.aliases:
        ev = ExtendedVocab.load(vocab, args.aliases)
        enc = lambda text: encode_extended(text, ev)
    else:
        enc = lambda text: encode(text, vocab)
    if table is not None:
        return lambda text: enc(transliterate(text, table))
    return enc


def cmd_encode(args):
    enc = _tokenizer(args)
    with _text_out(args.out) as out:
        for line in _lines(args.input):
            out.write(" ".join(map(str, enc(line))) + "\n")


def cmd_extend(args):
    _require_files(args.vocab, args.table)
    ev = extend(SubwordVocab.load(args.vocab), _load_table(args.table))
    with _text_out(args.out) as f:
        f.write(ev.dumps())
    log.info("%d aliases, %d collisions", len(ev.aliases), len(ev.collision_log))


def _read_corpus(args):
    if args.tsv:
        _require_files(args.tsv)
        return read_tsv(args.tsv, args.src_lang, args.tgt_lang)
    if not (args.src and args.tgt):
        raise UsageError("give either --tsv or both --src and --tgt")
    _require_files(args.src, args.tgt)
    return read_aligned(args.src, args.tgt, args.src_lang, args.tgt_lang)


def cmd_split(args):
    corpus = _read_corpus(args)
    spec = SplitSpec(args.fraction, args.seed)
    train_part, test_part = split(corpus, spec)
    for name, part in (("train", train_part), ("test", test_part)):
        if args.tsv:
            with atomic_output(f"{args.out_prefix}.{name}.tsv") as f:
                f.writelines(f"{s}\t{t}\n" for s, t in part.pairs)
        else:
            for side, lang in ((0, corpus.source_lang), (1, corpus.target_lang)):
                with atomic_output(f"{args.out_prefix}.{name}.{lang}") as f:
                    f.writelines(p[side] + "\n" for p in part.pairs)
    log.info("split %d pairs into %d train / %d test", len(corpus), len(train_part), len(test_part))


def cmd_cognates(args):
    _require_files(args.lexicon, args.table)
    table = _load_table(args.table)
    lexicon = read_lexicon(args.lexicon, table)
    corpus = _read_corpus(args)
    report = cognate_coverage(corpus, lexicon, table, authentic_only=args.authentic_only)
    with _text_out(args.out) as f:
        json.dump(report.as_dict(), f, ensure_ascii=False, indent=2)
        f.write("\n")
    print(f"pairs with a cognate: {report.pairs_with_cognate}/{report.pairs_total} "
          f"({report.fraction:.1%}); reference figure for Kol Zchut: about {REFERENCE_COVERAGE:.0%} "
          f"(informational only)", file=sys.stderr)


def cmd_mlm(args):
    _require_files(args.vocab, *args.input)
    vocab = SubwordVocab.load(args.vocab)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stats = MlmStats()
    examples = prepare_mlm(_lines(args.input), vocab, args.mask_prob, args.max_len, args.seed, stats=stats)
    ext = "jsonl" if args.format == "jsonl" else "bin"
    it = iter(examples)
    for shard in itertools.count():
        first = next(it, None)
        if first is None:
            break
        with atomic_output(out_dir / f"shard-{shard:05d}.{ext}", binary=args.format == "binary") as f:
            for ex in itertools.chain([first], itertools.islice(it, args.shard_size - 1)):
                f.write(ex.to_json() + "\n" if args.format == "jsonl" else ex.to_bytes())
    log.info("%d examples, %d empty lines skipped, %d/%d positions selected",
             stats.examples, stats.skipped_empty, stats.selected, stats.candidates)
    print(json.dumps({"lines": stats.lines, "examples": stats.examples,
                      "skipped_empty": stats.skipped_empty, "selected": stats.selected,
                      "candidates": stats.candidates}), file=sys.stderr)


def cmd_bleu(args):
    _require_files(args.hyp, args.ref)
    report = corpus_bleu(read_tokenized(args.hyp), read_tokenized(args.ref), max_n=args.max_n,
                         smoothing="add-1" if args.smooth else "none")
    json.dump(report.as_dict(), sys.stdout)
    sys.stdout.write("\n")


# -- parser ------------------------------------------------------------------

def _add_corpus_args(p):
    p.add_argument("--tsv", help="parallel corpus as source<TAB>target lines")
    p.add_argument("--src", help="source side, one sentence per line")
    p.add_argument("--tgt", help="target side, aligned with --src")
    p.add_argument("--src-lang", default="ar")
    p.add_argument("--tgt-lang", default="he")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="arhe", description="Arabic-Hebrew shared-script corpus toolkit")
    parser.add_argument("--version", action="store_true", help="print toolkit and mapping table versions")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("translit", help="transliterate Arabic letters to Hebrew script")
    p.add_argument("--table", help="mapping TSV (default: bundled table)")
    p.add_argument("--keep-diacritics", action="store_true")
    p.add_argument("--no-nfc", action="store_true")
    p.add_argument("--lossy", action="store_true", help="replace undecodable bytes with U+FFFD")
    p.add_argument("--out")
    p.add_argument("input", nargs="?")
    p.set_defaults(func=cmd_translit)

    p = sub.add_parser("train-tokenizer", help="train a WordPiece vocabulary")
    p.add_argument("--vocab-size", type=int, default=30000)
    p.add_argument("--alphabet", type=int, default=100)
    p.add_argument("--min-pair-frequency", type=int, default=2)
    p.add_argument("--max-word-chars", type=int, default=100)
    p.add_argument("--out")
    p.add_argument("corpus", nargs="*")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("encode", help="encode lines to token ids")
    p.add_argument("--vocab", required=True)
    p.add_argument("--aliases", help="alias TSV from 'extend'")
    p.add_argument("--table", help="transliterate input with this table before encoding")
    p.add_argument("--out")
    p.add_argument("input", nargs="*")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("extend", help="build Hebrew-script aliases for an Arabic vocab")
    p.add_argument("--vocab", required=True)
    p.add_argument("--table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("split", help="seeded train/test split of a parallel corpus")
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out-prefix", required=True)
    _add_corpus_args(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("cognate-stats", help="share of pairs containing a lexicon cognate")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--table")
    p.add_argument("--authentic-only", action="store_true")
    p.add_argument("--out")
    _add_corpus_args(p)
    p.set_defaults(func=cmd_cognates)

    p = sub.add_parser("mlm-prep", help="write masked-LM training shards")
    p.add_argument("--vocab", required=True)
    p.add_argument("--mask-prob", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-len", type=int, default=512)
    p.add_argument("--format", choices=("jsonl", "binary"), default="jsonl")
    p.add_argument("--shard-size", type=int, default=100_000)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("input", nargs="*")
    p.set_defaults(func=cmd_mlm)

    p = sub.add_parser("bleu", help="corpus BLEU as JSON")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--smooth", action="store_true", help="add-1 smoothing for zero-match orders")
    p.set_defaults(func=cmd_bleu)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code or EXIT_OK

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.version:
        try:
            table_version = load_table(default_table_path()).version or "unversioned"
        except (OSError, ValueError) as exc:
            table_version = f"unavailable ({exc})"
        print(f"arhe {__version__}\nmapping table {table_version}")
        return EXIT_OK
    if args.command is None:
        print(parser.format_usage(), file=sys.stderr, end="")
        return EXIT_USAGE
    try:
        args.func(args)
    except UsageError as exc:
        print(f"arhe {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, IndexError) as exc:
        print(f"arhe {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"arhe {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main() -> None:
    sys.exit(run())
