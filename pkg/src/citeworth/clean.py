"""Noise removal and abbreviation normalisation for opinion text."""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from . import citations
from .ingest import CaseDocument


class EmptyAfterCleaning(ValueError):
    pass


@dataclass(frozen=True)
class AbbreviationTable:
    """Dotted token -> replacement without a full stop.

    A replacement that starts lowercase takes the case of the first letter of
    the text it replaces ("Sec." -> "Section", "sec." -> "section").  Keys of
    a single letter ("A.", "Q.") match case-sensitively, all other keys match
    case-insensitively on their first letter only.
    """

    entries: Mapping[str, str]

    def __post_init__(self) -> None:
        for key, value in self.entries.items():
            if not key.endswith(".") or "." in value or not value:
                raise ValueError(f"bad abbreviation entry {key!r} -> {value!r}")
        lookup = {}
        alts = []
        for key in sorted(self.entries, key=len, reverse=True):
            head, rest = key[0], key[1:]
            if len(key) == 2 or not head.isalpha():
                alts.append(re.escape(key))
                lookup[key] = self.entries[key]
            else:
                alts.append(f"[{head.upper()}{head.lower()}]{re.escape(rest)}")
                lookup[head.upper() + rest] = self.entries[key]
                lookup[head.lower() + rest] = self.entries[key]
        object.__setattr__(self, "_lookup", lookup)
        object.__setattr__(
            self, "_pattern", re.compile(r"(?<![\w.])(?:%s)(?![\w])" % "|".join(alts))
        )

    @property
    def pattern(self) -> re.Pattern:
        return self._pattern  # type: ignore[attr-defined]

    def replacement(self, token: str) -> str:
        value = self._lookup[token]  # type: ignore[attr-defined]
        if value[0].islower() and token[0].isupper():
            return value[0].upper() + value[1:]
        return value

    def is_key(self, token: str) -> bool:
        return token in self._lookup  # type: ignore[attr-defined]

    @classmethod
    def from_file(cls, path: str | Path) -> "AbbreviationTable":
        return cls(_parse_table(Path(path).read_text("utf-8")))

    @classmethod
    def default(cls) -> "AbbreviationTable":
        return _DEFAULT_TABLE


def _parse_table(text: str) -> dict[str, str]:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two columns, got {line!r}")
        entries[parts[0].strip()] = parts[1].strip()
    return entries


_DEFAULT_TABLE = AbbreviationTable(
    _parse_table(resources.files("citeworth.data").joinpath("abbreviations.tsv").read_text("utf-8"))
)


def normalize_abbreviations(text: str, table: AbbreviationTable | None = None) -> str:
    return normalize_abbreviations_counted(text, table)[0]


def normalize_abbreviations_counted(text: str, table: AbbreviationTable | None = None) -> tuple[str, int]:
    table = table or _DEFAULT_TABLE
    if "." not in text:
        return text, 0
    return table.pattern.subn(lambda m: table.replacement(m.group()), text)


@dataclass(frozen=True)
class CleanOpinion:
    text: str
    removed_regions: tuple[tuple[int, int, str], ...]
    normalization_count: int


@dataclass(frozen=True)
class CleanConfig:
    excerpt_min_chars: int = 200
    excerpt_citation_window: int = 5


# Same-length substitutions applied before any pattern runs.
_CHAR_MAP = str.maketrans({
    "\u2019": "'", "\u2018": "'", "\u201b": "'", "\u2032": "'", "`": "'",
    "\u201c": '"', "\u201d": '"', "\u201e": '"', "\u2033": '"',
    "\u00a0": " ", "\u2002": " ", "\u2003": " ", "\u2009": " ", "\u202f": " ",
    "\u2013": "-", "\u2014": "-", "\u2010": "-", "\u2011": "-",
    "\t": " ", "\r": " ", "\f": "\n", "\v": "\n",
})

_NON_TEXT_RE = re.compile("[\x00-\x08\x0e-\x1f\x7f-\x9f\u00ad\u200b-\u200f\u2028\u2029\u2060-\u2064\ufeff\ufffd]")
_PLACEHOLDER_RE = re.compile(re.escape(citations.PLACEHOLDER))
_PAGE_LINE_RE = re.compile(r"^[ ]*[\[(]?\*{0,2}\d{1,5}[\])]?[ ]*(?:\n|$)", re.MULTILINE)
_STAR_PAGE_RE = re.compile(r" ?\[\*{1,2}\d{1,5}\]")
_BRACKET_NOTE_RE = re.compile(r" ?\[(?:fn|FN|n\.? ?)?\d{1,3}\]")
_TRAILING_NOTE_RE = re.compile(r"(?<=[a-z])[.,;:!?\"')\]]{0,2}(\d{1,3})(?=\s|$)")
_REPEAT_PUNCT_RE = re.compile(r"([.,;:!?])\1+")
_QUOTE_RE = re.compile(r'"([^"]*)"')


def _find_non_text(text: str) -> list[tuple[int, int, str]]:
    out = []
    for m in _NON_TEXT_RE.finditer(text):
        ch = m.group()
        out.append((m.start(), m.end(), "control" if ord(ch) <= 0x9f else "non_ascii"))
    for m in _PLACEHOLDER_RE.finditer(text):
        out.append((m.start(), m.end(), "placeholder"))
    return out


def _find_page_numbers(text: str) -> list[tuple[int, int, str]]:
    out = [(m.start(), m.end(), "page_number") for m in _PAGE_LINE_RE.finditer(text)]
    out += [(m.start(), m.end(), "page_number") for m in _STAR_PAGE_RE.finditer(text)]
    return out


def _find_footnotes(text: str) -> list[tuple[int, int, str]]:
    out = [(m.start(), m.end(), "footnote") for m in _BRACKET_NOTE_RE.finditer(text)]
    out += [(m.start(1), m.end(1), "footnote") for m in _TRAILING_NOTE_RE.finditer(text)]
    return out


def _find_excerpts(text: str, cfg: CleanConfig) -> list[tuple[int, int, str]]:
    out = []
    if '"' not in text:
        return out
    for m in _QUOTE_RE.finditer(text):
        if len(m.group(1)) <= cfg.excerpt_min_chars:
            continue
        after = text[m.end():m.end() + 400]
        spans = citations.detect_citations(after)
        if not spans:
            continue
        first = spans[0]
        if len(after[:first.start].split()) <= cfg.excerpt_citation_window:
            start = m.start()
            while start > 0 and text[start - 1] == " ":
                start -= 1
            out.append((start, m.end() + first.end, "excerpt"))
    return out


def _find_repeated_punct(text: str) -> list[tuple[int, int, str]]:
    return [(m.start() + 1, m.end(), "punctuation") for m in _REPEAT_PUNCT_RE.finditer(text)]


def _disjoint(regions: list[tuple[int, int, str]]) -> list[tuple[int, int, str]]:
    out: list[tuple[int, int, str]] = []
    for s, e, why in sorted(regions):
        if out and s < out[-1][1]:
            ps, pe, pwhy = out[-1]
            out[-1] = (ps, max(pe, e), pwhy)
        else:
            out.append((s, e, why))
    return out


class _DeletionLog:
    """Maps regions deleted from successive texts back to original offsets."""

    def __init__(self) -> None:
        self.starts: list[int] = []
        self.regions: list[tuple[int, int, str]] = []

    def _to_original(self, pos: int) -> int:
        # Shift past every earlier deletion that lies at or before the position.
        for s, e, _ in self.regions:
            if s <= pos:
                pos += e - s
            else:
                break
        return pos

    def record(self, regions: list[tuple[int, int, str]]) -> None:
        new = []
        for s, e, why in regions:
            os_ = self._to_original(s)
            oe = self._to_original(e - 1) + 1
            cur = os_
            for ds, de, _ in self.regions:
                if de <= cur or ds >= oe:
                    continue
                if ds > cur:
                    new.append((cur, ds, why))
                cur = max(cur, de)
            if cur < oe:
                new.append((cur, oe, why))
        for reg in new:
            i = bisect.bisect(self.starts, reg[0])
            self.starts.insert(i, reg[0])
            self.regions.insert(i, reg)


def _delete(text: str, regions: list[tuple[int, int, str]]) -> str:
    parts = []
    pos = 0
    for s, e, _ in regions:
        parts.append(text[pos:s])
        pos = e
    parts.append(text[pos:])
    return "".join(parts)


def clean_text(
    text: str,
    table: AbbreviationTable | None = None,
    config: CleanConfig | None = None,
) -> CleanOpinion:
    """Strip noise from raw opinion text, then normalise abbreviations."""
    cfg = config or CleanConfig()
    text = text.translate(_CHAR_MAP)
    log = _DeletionLog()
    finders = (
        _find_non_text,
        _find_page_numbers,
        _find_footnotes,
        lambda t: _find_excerpts(t, cfg),
        _find_repeated_punct,
    )
    for _ in range(4):
        changed = False
        for finder in finders:
            regions = _disjoint(finder(text))
            if regions:
                log.record(regions)
                text = _delete(text, regions)
                changed = True
        if not changed:
            break
    text, count = normalize_abbreviations_counted(text, table)
    return CleanOpinion(text, tuple(log.regions), count)


def clean_opinion(
    doc: CaseDocument,
    table: AbbreviationTable | None = None,
    config: CleanConfig | None = None,
) -> CleanOpinion:
    result = clean_text(doc.opinion_text, table, config)
    if not result.text.strip():
        raise EmptyAfterCleaning(doc.case_id)
    return result
