"""Citation-worthiness dataset construction for case law, with TF-IDF baselines."""

from .citations import PLACEHOLDER, detect_citations, mask_citations, process_sentence
from .clean import AbbreviationTable, clean_opinion, clean_text, normalize_abbreviations
from .evaluation import evaluate
from .ingest import CaseDocument, parse_case, stream_corpus
from .labeler import LabeledRecord, emit_records, make_split, profile
from .segment import split_sentences, split_text

__version__ = "0.1.0"

__all__ = [
    "PLACEHOLDER",
    "AbbreviationTable",
    "CaseDocument",
    "LabeledRecord",
    "clean_opinion",
    "clean_text",
    "detect_citations",
    "emit_records",
    "evaluate",
    "make_split",
    "mask_citations",
    "normalize_abbreviations",
    "parse_case",
    "process_sentence",
    "profile",
    "split_sentences",
    "split_text",
    "stream_corpus",
]
