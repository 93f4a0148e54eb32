"""Reading case-law records into :class:`CaseDocument` values.

The default input schema follows the CAP bulk export: one JSON object per line
(or one per ``.json`` file) with the opinion text under
``casebody.data.opinions[*].text`` and cited cases under ``cites_to[*].cite``.
"""

from __future__ import annotations

import bz2
import gzip
import json
import logging
import lzma
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Sequence

logger = logging.getLogger(__name__)


class MalformedRecord(ValueError):
    pass


class MissingOpinion(ValueError):
    pass


class SourceUnreadable(OSError):
    pass


@dataclass(frozen=True)
class CaseDocument:
    case_id: str
    file_name: str
    jurisdiction: str
    decision_year: int | None
    opinion_text: str
    metadata_citations: tuple[str, ...] = ()
    ocr_confidence: float | None = None
    repairs: int = 0

    def __post_init__(self) -> None:
        if not self.case_id or not self.file_name:
            raise MalformedRecord("case_id and file_name must be non-empty")


@dataclass(frozen=True)
class InputSchema:
    """Dotted paths of the logical fields inside one JSON record.

    Each path may name several alternatives separated by ``|``; the first one
    present wins.
    """

    case_id: str = "id|case_id"
    file_name: str = "file_name"
    jurisdiction: str = "jurisdiction.slug|jurisdiction"
    decision_date: str = "decision_date|decision_year"
    opinions: str = "casebody.data.opinions|casebody.opinions|opinions|opinion_text|opinion"
    opinion_text_key: str = "text"
    citations: str = "cites_to|metadata_citations|citations"
    citation_key: str = "cite"
    ocr_confidence: str = "analysis.ocr_confidence|ocr_confidence"

    @classmethod
    def from_json(cls, path: str | Path) -> "InputSchema":
        return cls(**json.loads(Path(path).read_text("utf-8")))


DEFAULT_SCHEMA = InputSchema()
_MISSING = object()


def _lookup(record: Any, paths: str) -> Any:
    for path in paths.split("|"):
        node = record
        for part in path.split("."):
            if isinstance(node, dict) and part in node:
                node = node[part]
            else:
                node = _MISSING
                break
        if node is not _MISSING and node is not None:
            return node
    return _MISSING


def repair_utf8(raw: bytes) -> tuple[str, int]:
    """Decode UTF-8, replacing each invalid sequence with U+FFFD; also return the count."""
    try:
        return raw.decode("utf-8"), 0
    except UnicodeDecodeError:
        pass
    parts = []
    repairs = 0
    pos = 0
    while pos < len(raw):
        try:
            parts.append(raw[pos:].decode("utf-8"))
            break
        except UnicodeDecodeError as exc:
            parts.append(raw[pos:pos + exc.start].decode("utf-8"))
            parts.append("\ufffd")
            repairs += 1
            pos += exc.end
    return "".join(parts), repairs


def _year(value: Any) -> int | None:
    if value is _MISSING:
        return None
    if isinstance(value, int):
        return value
    text = str(value).strip()
    if len(text) >= 4 and text[:4].isdigit():
        return int(text[:4])
    return None


def _opinion_text(value: Any, key: str) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        value = [value]
    if isinstance(value, list):
        texts = []
        for op in value:
            if isinstance(op, str):
                texts.append(op)
            elif isinstance(op, dict) and isinstance(op.get(key), str):
                texts.append(op[key])
        return "\n\n".join(t for t in texts if t.strip())
    return ""


def _citations(value: Any, key: str) -> tuple[str, ...]:
    if value is _MISSING or not isinstance(value, list):
        return ()
    out = []
    for item in value:
        if isinstance(item, str):
            out.append(item)
        elif isinstance(item, dict) and isinstance(item.get(key), str):
            out.append(item[key])
    return tuple(c for c in out if c.strip())


def parse_case(
    raw_bytes: bytes,
    schema: InputSchema = DEFAULT_SCHEMA,
    default_file_name: str | None = None,
) -> CaseDocument:
    """Parse one JSON record. Only the opinion section is kept."""
    text, repairs = repair_utf8(raw_bytes)
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(str(exc)) from None
    if not isinstance(record, dict):
        raise MalformedRecord("record is not a JSON object")

    case_id = _lookup(record, schema.case_id)
    if case_id is _MISSING or str(case_id) == "":
        raise MalformedRecord("record has no id")
    case_id = str(case_id)

    opinion = _opinion_text(_lookup(record, schema.opinions), schema.opinion_text_key)
    if not opinion.strip():
        raise MissingOpinion(case_id)

    file_name = _lookup(record, schema.file_name)
    if file_name is _MISSING:
        file_name = default_file_name or case_id
    jurisdiction = _lookup(record, schema.jurisdiction)
    if isinstance(jurisdiction, dict):
        jurisdiction = jurisdiction.get("slug", _MISSING)
    ocr = _lookup(record, schema.ocr_confidence)
    try:
        ocr = None if ocr is _MISSING else float(ocr)
    except (TypeError, ValueError):
        ocr = None

    return CaseDocument(
        case_id=case_id,
        file_name=str(file_name),
        jurisdiction="" if jurisdiction is _MISSING else str(jurisdiction),
        decision_year=_year(_lookup(record, schema.decision_date)),
        opinion_text=opinion,
        metadata_citations=_citations(_lookup(record, schema.citations), schema.citation_key),
        ocr_confidence=ocr,
        repairs=repairs,
    )


@dataclass
class IngestCounters:
    encountered: int = 0
    yielded: int = 0
    malformed: int = 0
    missing_opinion: int = 0
    filtered: int = 0
    repaired: int = 0

    @property
    def skipped(self) -> int:
        return self.malformed + self.missing_opinion + self.filtered

    def as_dict(self) -> dict[str, int]:
        return {
            "encountered": self.encountered,
            "yielded": self.yielded,
            "malformed": self.malformed,
            "missing_opinion": self.missing_opinion,
            "filtered": self.filtered,
            "repaired": self.repaired,
        }


@dataclass(frozen=True)
class DocumentFilter:
    jurisdictions: frozenset[str] = frozenset()
    min_year: int | None = None
    max_year: int | None = None

    def __call__(self, doc: CaseDocument) -> bool:
        if self.jurisdictions and doc.jurisdiction not in self.jurisdictions:
            return False
        if self.min_year is not None and (doc.decision_year is None or doc.decision_year < self.min_year):
            return False
        if self.max_year is not None and (doc.decision_year is None or doc.decision_year > self.max_year):
            return False
        return True


_SUFFIXES = (".jsonl", ".ndjson", ".json")
_COMPRESSED = {".gz": gzip.open, ".xz": lzma.open, ".bz2": bz2.open}


def _is_input_file(path: Path) -> bool:
    name = path.name
    for ext in _COMPRESSED:
        if name.endswith(ext):
            name = name[: -len(ext)]
    return name.endswith(_SUFFIXES)


def _open(path: Path):
    opener = _COMPRESSED.get(path.suffix)
    return opener(path, "rb") if opener else open(path, "rb")


def _is_single_record(path: Path) -> bool:
    name = path.name
    for ext in _COMPRESSED:
        if name.endswith(ext):
            name = name[: -len(ext)]
    return name.endswith(".json")


@dataclass
class CorpusStream:
    """Iterable over the documents of a file or directory, in a fixed order.

    Files are visited in lexicographic order of their path relative to the
    source; records inside a JSON-lines file keep their line order.  Counters
    are complete once iteration finishes.
    """

    source: str | Path
    filter: Callable[[CaseDocument], bool] | None = None
    schema: InputSchema = DEFAULT_SCHEMA
    max_docs: int | None = None
    counters: IngestCounters = field(default_factory=IngestCounters)

    def files(self) -> list[Path]:
        root = Path(self.source)
        if not root.exists() or not os.access(root, os.R_OK):
            raise SourceUnreadable(f"cannot read {root}")
        if root.is_file():
            return [root]
        found = []
        for dirpath, dirnames, filenames in os.walk(root):
            dirnames.sort()
            for name in filenames:
                path = Path(dirpath, name)
                if _is_input_file(path):
                    found.append(path)
        return sorted(found, key=lambda p: p.relative_to(root).as_posix())

    def _records(self) -> Iterator[tuple[bytes, str]]:
        root = Path(self.source)
        for path in self.files():
            rel = path.name if root.is_file() else path.relative_to(root).as_posix()
            try:
                fh = _open(path)
            except OSError as exc:
                raise SourceUnreadable(f"cannot read {path}: {exc}") from exc
            with fh:
                if _is_single_record(path):
                    yield fh.read(), rel
                    continue
                for lineno, line in enumerate(fh, 1):
                    if line.strip():
                        yield line, f"{rel}:{lineno:07d}"

    def __iter__(self) -> Iterator[CaseDocument]:
        self.counters = counters = IngestCounters()
        for raw, name in self._records():
            if self.max_docs is not None and counters.yielded >= self.max_docs:
                break
            counters.encountered += 1
            try:
                doc = parse_case(raw, self.schema, default_file_name=name)
            except MalformedRecord:
                counters.malformed += 1
                continue
            except MissingOpinion:
                counters.missing_opinion += 1
                continue
            if doc.repairs:
                counters.repaired += 1
            if self.filter is not None and not self.filter(doc):
                counters.filtered += 1
                continue
            counters.yielded += 1
            yield doc
        logger.info("ingest finished: %s", counters.as_dict())


def stream_corpus(
    source: str | Path,
    filter: Callable[[CaseDocument], bool] | None = None,
    schema: InputSchema = DEFAULT_SCHEMA,
    max_docs: int | None = None,
) -> CorpusStream:
    stream = CorpusStream(source, filter, schema, max_docs)
    stream.files()  # fail early on an unreadable source
    return stream


def write_jsonl(records: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, "rb") as fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)


def case_record(
    case_id: str,
    opinions: Sequence[str],
    cites: Sequence[str] = (),
    jurisdiction: str = "ill",
    decision_date: str = "1950-01-01",
    file_name: str | None = None,
) -> dict:
    """A record in the default CAP-shaped schema (fixtures, synthetic corpora)."""
    rec = {
        "id": case_id,
        "decision_date": decision_date,
        "jurisdiction": {"slug": jurisdiction},
        "casebody": {"data": {"head_matter": "", "opinions": [{"type": "majority", "text": t} for t in opinions]}},
        "cites_to": [{"cite": c} for c in cites],
    }
    if file_name is not None:
        rec["file_name"] = file_name
    return rec
