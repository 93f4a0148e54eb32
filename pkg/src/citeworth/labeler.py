"""Sentence typing, record emission, document-level splits and dataset statistics."""

from __future__ import annotations

import enum
import hashlib
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .citations import ProcessedSentence

SPLITS = ("train", "dev", "test")
SPLIT_RATIOS = (0.8, 0.1, 0.1)
VERSION_SIZES = {"small": 1_000_000, "medium": 10_000_000, "large": None}


class TargetTooLarge(ValueError):
    pass


class SentenceType(enum.IntEnum):
    TYPE1 = 1  # no inline citation, next sentence likewise: label 0
    TYPE2 = 2  # no inline citation, next sentence has one: ignored
    TYPE3 = 3  # has an inline citation: ignored
    TYPE4 = 4  # no inline citation, next sentence is citation-only: label 1


@dataclass(frozen=True)
class LabeledRecord:
    file_name: str
    sentence_number: int
    sentence: str
    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")

    def to_json(self) -> dict:
        return {
            "file_name": self.file_name,
            "sentence_number": self.sentence_number,
            "sentence": self.sentence,
            "label": self.label,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "LabeledRecord":
        return cls(str(obj["file_name"]), int(obj["sentence_number"]), str(obj["sentence"]), int(obj["label"]))


def classify_sentence_type(current: ProcessedSentence, next: ProcessedSentence | None) -> SentenceType:
    if current.contains_inline_citation:
        return SentenceType.TYPE3
    if next is not None and next.is_citation_only:
        return SentenceType.TYPE4
    if next is not None and next.contains_inline_citation:
        return SentenceType.TYPE2
    return SentenceType.TYPE1


def emit_records(doc_sentences: Sequence[ProcessedSentence], file_name: str) -> list[LabeledRecord]:
    """Label-0 records for Type 1 sentences, label-1 records for Type 4."""
    out = []
    for i, sent in enumerate(doc_sentences):
        if sent.is_citation_only:
            continue
        nxt = doc_sentences[i + 1] if i + 1 < len(doc_sentences) else None
        kind = classify_sentence_type(sent, nxt)
        if kind is SentenceType.TYPE1:
            out.append(LabeledRecord(file_name, i, sent.original, 0))
        elif kind is SentenceType.TYPE4:
            out.append(LabeledRecord(file_name, i, sent.original, 1))
    return out


# ---------------------------------------------------------------------------
# Splits


def _unit_hash(seed: int, key: str) -> int:
    return int.from_bytes(hashlib.blake2b(f"{seed}\x00{key}".encode(), digest_size=8).digest(), "big")


@dataclass(frozen=True)
class CorpusSplit:
    assignment: Mapping[str, str]
    seed: int
    ratios: tuple[float, float, float] = SPLIT_RATIOS

    def __getitem__(self, doc_id: str) -> str:
        return self.assignment[doc_id]

    def members(self, split: str) -> list[str]:
        return [d for d, s in self.assignment.items() if s == split]

    def counts(self) -> dict[str, int]:
        out = dict.fromkeys(SPLITS, 0)
        for s in self.assignment.values():
            out[s] += 1
        return out


def make_split(documents: Sequence[str], seed: int = 0, ratios: tuple[float, float, float] = SPLIT_RATIOS) -> CorpusSplit:
    """Partition documents 80:10:10 by count.

    Documents are ranked by a seeded hash of their id; the first
    ``round(0.8 n)`` go to train, the next ``round(0.1 n)`` to dev, the rest to
    test.  The result does not depend on input order.
    """
    if len(set(documents)) != len(documents):
        raise ValueError("document ids must be unique")
    ranked = sorted(documents, key=lambda d: (_unit_hash(seed, d), d))
    n = len(ranked)
    n_train = round(ratios[0] * n)
    n_dev = min(round(ratios[1] * n), n - n_train)
    assignment = {}
    for i, doc in enumerate(ranked):
        assignment[doc] = "train" if i < n_train else "dev" if i < n_train + n_dev else "test"
    return CorpusSplit(assignment, seed, ratios)


# ---------------------------------------------------------------------------
# Version sampling


def select_documents(doc_sizes: Sequence[tuple[str, int]], target_total: int | None, seed: int = 0) -> set[str]:
    """Pick whole documents in seeded random order until ``target_total`` sentences are reached.

    ``target_total=None`` selects everything.  The last document may overshoot
    the budget by less than its own size.
    """
    total = sum(n for _, n in doc_sizes)
    if target_total is None or target_total == total:
        return {d for d, _ in doc_sizes}
    if target_total > total:
        raise TargetTooLarge(f"target {target_total} exceeds corpus size {total}")
    order = list(doc_sizes)
    random.Random(seed).shuffle(order)
    chosen = set()
    acc = 0
    for doc, n in order:
        if acc >= target_total:
            break
        if n == 0:
            continue
        chosen.add(doc)
        acc += n
    return chosen


def sample_version(records: Iterable[LabeledRecord], target_total: int | None, seed: int = 0) -> Iterator[LabeledRecord]:
    """Sample whole documents from a record stream (materialised in memory)."""
    records = list(records)
    sizes: dict[str, int] = {}
    for rec in records:
        sizes[rec.file_name] = sizes.get(rec.file_name, 0) + 1
    chosen = select_documents(sorted(sizes.items()), target_total, seed)
    return (r for r in records if r.file_name in chosen)


# ---------------------------------------------------------------------------
# Profiling


@dataclass
class DatasetStats:
    total_sentences: int = 0
    total_files: int = 0
    split_sentences: dict[str, int] = field(default_factory=lambda: dict.fromkeys(SPLITS, 0))
    split_files: dict[str, int] = field(default_factory=lambda: dict.fromkeys(SPLITS, 0))
    citation_worthy_count: int = 0
    non_citation_worthy_count: int = 0
    avg_char_len_worthy: float | None = None
    avg_char_len_nonworthy: float | None = None
    sentences_per_document: float | None = None

    def to_json(self) -> dict:
        return {
            "total_sentences": self.total_sentences,
            "total_files": self.total_files,
            "split_sentences": dict(self.split_sentences),
            "split_files": dict(self.split_files),
            "citation_worthy_count": self.citation_worthy_count,
            "non_citation_worthy_count": self.non_citation_worthy_count,
            "citation_worthy_rate": (
                self.citation_worthy_count / self.total_sentences if self.total_sentences else None
            ),
            "avg_char_len_worthy": self.avg_char_len_worthy,
            "avg_char_len_nonworthy": self.avg_char_len_nonworthy,
            "sentences_per_document": self.sentences_per_document,
        }


@dataclass
class StatsAccumulator:
    """Associative fold behind :func:`profile`; ``merge`` combines partial folds."""

    files: dict[str, str | None] = field(default_factory=dict)
    split_sentences: dict[str, int] = field(default_factory=lambda: dict.fromkeys(SPLITS, 0))
    counts: list[int] = field(default_factory=lambda: [0, 0])
    char_totals: list[int] = field(default_factory=lambda: [0, 0])

    def add(self, rec: LabeledRecord, split: str | None = None) -> None:
        self.files.setdefault(rec.file_name, split)
        if split is not None:
            self.split_sentences[split] += 1
        self.counts[rec.label] += 1
        self.char_totals[rec.label] += len(rec.sentence)

    def merge(self, other: "StatsAccumulator") -> "StatsAccumulator":
        out = StatsAccumulator()
        out.files = {**self.files, **other.files}
        out.split_sentences = {k: self.split_sentences[k] + other.split_sentences[k] for k in SPLITS}
        out.counts = [a + b for a, b in zip(self.counts, other.counts)]
        out.char_totals = [a + b for a, b in zip(self.char_totals, other.char_totals)]
        return out

    def result(self) -> DatasetStats:
        total = sum(self.counts)
        split_files = dict.fromkeys(SPLITS, 0)
        for s in self.files.values():
            if s is not None:
                split_files[s] += 1
        return DatasetStats(
            total_sentences=total,
            total_files=len(self.files),
            split_sentences=dict(self.split_sentences),
            split_files=split_files,
            citation_worthy_count=self.counts[1],
            non_citation_worthy_count=self.counts[0],
            avg_char_len_worthy=self.char_totals[1] / self.counts[1] if self.counts[1] else None,
            avg_char_len_nonworthy=self.char_totals[0] / self.counts[0] if self.counts[0] else None,
            sentences_per_document=total / len(self.files) if self.files else None,
        )


def profile(
    records: Iterable[LabeledRecord],
    split_of: Mapping[str, str] | Callable[[str], str] | None = None,
) -> DatasetStats:
    acc = StatsAccumulator()
    lookup = split_of.get if isinstance(split_of, Mapping) else split_of
    for rec in records:
        acc.add(rec, lookup(rec.file_name) if lookup else None)
    return acc.result()
