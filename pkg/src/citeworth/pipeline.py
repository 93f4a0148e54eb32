"""End-to-end dataset construction.

``build`` streams documents through clean -> segment -> citation masking ->
labeling, writes every record to a checkpoint (``records.jsonl`` plus a
per-document index), then ``split_dataset`` samples the requested version,
assigns documents to train/dev/test and writes the split files and
``stats.json``.  Split files are ordered by (file_name, sentence_number)
whatever the worker count.
"""

from __future__ import annotations

import json
import logging
import multiprocessing
import os
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import citations
from .clean import AbbreviationTable, CleanConfig, EmptyAfterCleaning, clean_opinion
from .ingest import CaseDocument, DocumentFilter, InputSchema, stream_corpus
from .labeler import (
    SPLITS,
    VERSION_SIZES,
    LabeledRecord,
    StatsAccumulator,
    emit_records,
    make_split,
    select_documents,
)
from .segment import SentenceUnit, split_sentences

logger = logging.getLogger(__name__)

THREADS_ENV = "CITEWORTH_THREADS"
RECORDS_FILE = "records.jsonl"
INDEX_FILE = "documents.jsonl"


@dataclass(frozen=True)
class PipelineConfig:
    input: str | None = None
    out: str | None = None
    seed: int = 0
    version: str = "large"
    abbrev_table: str | None = None
    reporters: str | None = None
    schema: str | None = None
    jurisdictions: tuple[str, ...] = ()
    max_docs: int | None = None
    threads: int | None = None
    versus_tokens: tuple[str, ...] = ("v.",)
    excerpt_min_chars: int = 200
    C: float = 0.1151395399
    threshold: float = 0.5

    def resolved_threads(self) -> int:
        if self.threads:
            return self.threads
        env = os.environ.get(THREADS_ENV)
        if env:
            return max(1, int(env))
        return os.cpu_count() or 1

    def to_json(self) -> dict:
        out = asdict(self)
        out["jurisdictions"] = list(self.jurisdictions)
        out["versus_tokens"] = list(self.versus_tokens)
        return out

    @classmethod
    def from_mapping(cls, data: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        for key in ("jurisdictions", "versus_tokens"):
            if key in data and data[key] is not None:
                data[key] = tuple(data[key])
        return cls(**data)

    def merged(self, **overrides) -> "PipelineConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


@dataclass
class DocumentResult:
    file_name: str
    case_id: str
    n_sentences: int = 0
    records: list[LabeledRecord] = field(default_factory=list)
    skipped: str | None = None
    normalizations: int = 0
    removed_regions: int = 0


class DocumentProcessor:
    """Per-document pipeline; holds only immutable compiled rules."""

    def __init__(self, config: PipelineConfig) -> None:
        self.table = AbbreviationTable.from_file(config.abbrev_table) if config.abbrev_table else AbbreviationTable.default()
        lexicon = citations.load_reporter_lexicon(config.reporters)
        self.rules = citations.CitationRules(lexicon, tuple(config.versus_tokens))
        self.clean_config = CleanConfig(excerpt_min_chars=config.excerpt_min_chars)

    def sentences(self, doc: CaseDocument) -> list[SentenceUnit]:
        clean = clean_opinion(doc, self.table, self.clean_config)
        return split_sentences(clean, self.table, self.rules)

    def __call__(self, doc: CaseDocument) -> DocumentResult:
        result = DocumentResult(doc.file_name, doc.case_id)
        try:
            clean = clean_opinion(doc, self.table, self.clean_config)
        except EmptyAfterCleaning:
            result.skipped = "empty_after_cleaning"
            return result
        result.normalizations = clean.normalization_count
        result.removed_regions = len(clean.removed_regions)
        units = split_sentences(clean, self.table, self.rules)
        meta = [self.table.pattern.sub(lambda m: self.table.replacement(m.group()), c) for c in doc.metadata_citations]
        processed = [citations.process_sentence(u.text, meta, self.rules) for u in units]
        result.n_sentences = len(units)
        result.records = emit_records(processed, doc.file_name)
        return result


_WORKER: DocumentProcessor | None = None


def _init_worker(config: PipelineConfig) -> None:
    global _WORKER
    _WORKER = DocumentProcessor(config)


def _work(doc: CaseDocument) -> DocumentResult:
    assert _WORKER is not None
    return _WORKER(doc)


def process_documents(
    docs: Iterable[CaseDocument],
    config: PipelineConfig,
    threads: int | None = None,
    chunksize: int = 8,
) -> Iterator[DocumentResult]:
    """Map the document processor over ``docs``, preserving input order."""
    threads = threads or config.resolved_threads()
    if threads <= 1:
        proc = DocumentProcessor(config)
        for doc in docs:
            yield proc(doc)
        return
    ctx = multiprocessing.get_context("fork" if "fork" in multiprocessing.get_all_start_methods() else "spawn")
    with ctx.Pool(threads, initializer=_init_worker, initargs=(config,)) as pool:
        yield from pool.imap(_work, docs, chunksize=chunksize)


def open_stream(config: PipelineConfig):
    if not config.input:
        raise ValueError("no input given")
    filt = DocumentFilter(frozenset(config.jurisdictions)) if config.jurisdictions else None
    schema = InputSchema.from_json(config.schema) if config.schema else InputSchema()
    return stream_corpus(config.input, filt, schema, config.max_docs)


def _dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def build(config: PipelineConfig, progress_every: int = 10_000) -> dict:
    """Run ingest + per-document processing, write the checkpoint, then split."""
    if not config.out:
        raise ValueError("no output directory given")
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    stream = open_stream(config)
    counters = {"documents": 0, "empty_after_cleaning": 0, "duplicates": 0, "sentences": 0, "records": 0, "normalizations": 0, "removed_regions": 0}
    seen: set[str] = set()
    t0 = time.perf_counter()
    with open(out / RECORDS_FILE, "wb") as rec_fh, open(out / INDEX_FILE, "w", encoding="utf-8") as idx_fh:
        for res in process_documents(stream, config):
            counters["documents"] += 1
            if res.skipped:
                counters[res.skipped] += 1
                continue
            if res.file_name in seen:
                counters["duplicates"] += 1
                continue
            seen.add(res.file_name)
            counters["sentences"] += res.n_sentences
            counters["normalizations"] += res.normalizations
            counters["removed_regions"] += res.removed_regions
            offset = rec_fh.tell()
            n_pos = 0
            for rec in res.records:
                rec_fh.write(json.dumps(rec.to_json(), ensure_ascii=False).encode("utf-8") + b"\n")
                n_pos += rec.label
            counters["records"] += len(res.records)
            idx_fh.write(json.dumps({
                "file_name": res.file_name,
                "case_id": res.case_id,
                "offset": offset,
                "length": rec_fh.tell() - offset,
                "records": len(res.records),
                "positives": n_pos,
                "sentences": res.n_sentences,
            }) + "\n")
            if progress_every and counters["documents"] % progress_every == 0:
                rate = counters["documents"] / (time.perf_counter() - t0)
                logger.info("%d documents (%.0f/s), %d records", counters["documents"], rate, counters["records"])
    counters["ingest"] = {**stream.counters.as_dict(), "skipped": stream.counters.skipped}
    counters["seconds"] = round(time.perf_counter() - t0, 3)
    logger.info("build finished: %s", counters)
    _dump({k: v for k, v in counters.items() if k != "seconds"}, out / "counters.json")
    stats = split_dataset(out, config)
    return {"counters": counters, "stats": stats}


def read_index(out: str | Path) -> list[dict]:
    with open(Path(out) / INDEX_FILE, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def version_target(version: str) -> int | None:
    if version not in VERSION_SIZES:
        raise ValueError(f"unknown version {version!r}; expected one of {sorted(VERSION_SIZES)}")
    return VERSION_SIZES[version]


def split_dataset(out: str | Path, config: PipelineConfig, target_total: int | None = None) -> dict:
    """Sample a version from the checkpoint and write train/dev/test + stats.json.

    ``target_total`` overrides the size implied by ``config.version``.
    """
    out = Path(out)
    index = read_index(out)
    target = target_total if target_total is not None else version_target(config.version)
    chosen = select_documents([(d["file_name"], d["records"]) for d in index], target, config.seed)
    docs = sorted((d for d in index if d["file_name"] in chosen and d["records"]), key=lambda d: d["file_name"])
    split = make_split([d["file_name"] for d in docs], config.seed)
    acc = StatsAccumulator()
    handles = {s: open(out / f"{s}.jsonl", "wb") for s in SPLITS}
    try:
        with open(out / RECORDS_FILE, "rb") as src:
            for d in docs:
                src.seek(d["offset"])
                chunk = src.read(d["length"])
                name = split[d["file_name"]]
                handles[name].write(chunk)
                for line in chunk.splitlines():
                    acc.add(LabeledRecord.from_json(json.loads(line)), name)
    finally:
        for fh in handles.values():
            fh.close()
    stats = acc.result().to_json()
    _dump(stats, out / "stats.json")
    _dump(config.to_json(), out / "config.json")
    return stats


def load_records(path: str | Path) -> Iterator[LabeledRecord]:
    with open(path, "rb") as fh:
        for line in fh:
            if line.strip():
                yield LabeledRecord.from_json(json.loads(line))


def stats_for_directory(out: str | Path) -> dict:
    acc = StatsAccumulator()
    for name in SPLITS:
        path = Path(out) / f"{name}.jsonl"
        if path.exists():
            for rec in load_records(path):
                acc.add(rec, name)
    return acc.result().to_json()


def dump_sentences(config: PipelineConfig, sink) -> int:
    proc = DocumentProcessor(config)
    n = 0
    for doc in open_stream(config):
        try:
            units = proc.sentences(doc)
        except EmptyAfterCleaning:
            continue
        for u in units:
            sink.write(f"{doc.file_name}\t{u.index}\t{u.span[0]}\t{u.span[1]}\t{u.text}\n")
            n += 1
    return n
