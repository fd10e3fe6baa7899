"""Shared-script Arabic-Hebrew corpus preparation and tokenization toolkit."""

__version__ = "0.1.0"

from .bleu import BleuReport, corpus_bleu
from .corpus import (CognateLexicon, CoverageReport, ParallelCorpus, SplitSpec, cognate_coverage,
                     split)
from .extend import ExtendedVocab, encode_extended, extend
from .mlm import MaskedExample, prepare_mlm
from .translit import (TransliterationTable, TranslitOptions, default_table, load_table,
                       transliterate, transliterate_stream)
from .wordpiece import SubwordVocab, TrainerConfig, decode, encode, pretokenize, train, wrap
