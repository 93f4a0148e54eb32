"""Rule-based citation detection and placeholder masking.

Two citation shapes are recognised:

* versus citations, ``Party A v. Party B`` optionally followed by a reporter
  citation, pin cites and a parenthetical year;
* reporter citations, ``volume reporter page`` with pin cites and
  parentheticals, e.g. ``170 Wis. 2d 293, 299``.

Detected spans are replaced by :data:`PLACEHOLDER`.  A sentence consisting of
nothing but placeholders (optionally introduced by ``See``/``eg``) is a
citation-only sentence.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

PLACEHOLDER = "[CITATION_SPAN]"

CITATION_ONLY_RE = re.compile(r"^(See)?(\s)?(eg)?(\s)?(\[CITATION_SPAN\]\s?)+[.;]?$")


class SpanOutOfBounds(ValueError):
    pass


class SpanKind(str, enum.Enum):
    VERSUS = "versus"
    REPORTER = "reporter"


@dataclass(frozen=True)
class CitationSpan:
    start: int
    end: int
    kind: SpanKind
    raw: str


@dataclass(frozen=True)
class ProcessedSentence:
    original: str
    masked: str
    spans: tuple[CitationSpan, ...]
    contains_inline_citation: bool
    is_citation_only: bool


# Abbreviated words allowed inside party names ("Ind. Univ.", "Coal Co.").
PARTY_ABBREVIATIONS = (
    "Ass'n", "Assn", "Auth", "Ave", "Bd", "Bhd", "Bros", "Cas", "Cent", "Chem",
    "Cnty", "Co", "Comm", "Commn", "Commr", "Comm'r", "Corp", "Cty", "Dep't",
    "Dept", "Dev", "Dist", "Div", "Elec", "Fed", "Fin", "Gen", "Gov't", "Govt",
    "Hosp", "Inc", "Ind", "Indus", "Ins", "Int'l", "Intl", "Inv", "Ltd", "Mach",
    "Mfg", "Mgmt", "Mun", "Mut", "Nat'l", "Natl", "Pac", "Prod", "Pub", "Ry",
    "Sav", "Sch", "Serv", "Servs", "Soc", "St", "Sys", "Tel", "Tr", "Transp",
    "Twp", "Univ", "Mt", "Ft", "Bldg", "Ass", "Am", "Atl", "Cal", "Ill", "Mass",
    "Mich", "Tex", "Wis", "Pa", "Ky", "Va", "Md", "Ga", "Fla", "Ala", "Ark",
    "Conn", "Del", "Kan", "Minn", "Miss", "Mo", "Mont", "Neb", "Nev", "Okla",
    "Or", "Tenn", "Vt", "Wash", "Wyo", "Colo", "Ariz",
)

# Words that introduce a citation but are not part of the party name.
LEADING_SIGNALS = frozenset(
    {"See", "Also", "Cf", "Compare", "But", "Accord", "Contra", "In", "And", "Eg", "Under", "Following"}
)

_ABBR = r"(?:%s)\." % "|".join(
    re.escape(a) for a in sorted(PARTY_ABBREVIATIONS, key=len, reverse=True)
)
_INITIALS = r"(?:[A-Z]\.){2,}"
# Corporate suffix set off by a comma ("Smith & Sons, Inc.").
_SUFFIX = r"(?:,\s(?:Inc|Incorporated|Ltd|Co|Corp|et\sal)\b\.?)"
# The base party pattern, widened with dotted abbreviations, \b after
# the lowercase connectors and an optional corporate suffix.
_PARTY = (
    rf"(?:{_INITIALS}|{_ABBR}|[A-Z][A-Za-z'-]+|[A-Z]\.)"
    rf"(?:\s(?:{_INITIALS}|{_ABBR}|[A-Z]\.|of\b|and\b|&)|\s[A-Z][A-Za-z'-]*)*"
    rf"{_SUFFIX}?"
)

_SERIES = r"\d(?:d|st|nd|rd|th)\b"
_TOKEN = rf"(?:(?:[A-Z][A-Za-z']*\.)+(?:{_SERIES})?|[A-Z][A-Za-z']*(?:\d(?:d|st|nd|rd|th))?\b|{_SERIES}|&)"
_REPORTER_BODY = rf"{_TOKEN}(?:\s{_TOKEN}){{0,5}}"
_PIN = r"(?:,\s?(?:at\s)?\d{1,5}(?:[-–]\d{1,5})?(?:\s?n\.\s?\d{1,3})?(?!\d|\s+[A-Z&]|\s+\d(?:d|st|nd|rd|th)\b|\s+\d+\s))"
_PAREN = r"(?:\s?\((?=[^()]*\d)[^()\n]{1,80}\))"
_REPORTER_RE = re.compile(
    rf"(?<![\w.])(?P<vol>\d{{1,4}})\s(?P<body>{_REPORTER_BODY})\s(?P<page>\d{{1,5}})(?![\w])"
    rf"(?P<tail>{_PIN}*{_PAREN}*)"
)
_DIGIT_RE = re.compile(r"\d")
_PARALLEL_GAP_RE = re.compile(r"\s*,\s*")
_VERSUS_GAP_RE = re.compile(r"[\s,]*")
_TRAILING_CONNECTOR_RE = re.compile(r"(?:\s(?:of|and|&))+$")


def _lexicon_key(token: str) -> str:
    return re.sub(r"[\s.]", "", token).lower()


def load_reporter_lexicon(path: str | Path | None = None) -> frozenset[str]:
    """Reporter keys (periods, spaces and case removed) from a one-per-line file."""
    if path is None:
        text = resources.files("citeworth.data").joinpath("reporters.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    keys = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            keys.add(_lexicon_key(line))
    return frozenset(keys)


@dataclass(frozen=True)
class CitationRules:
    """Compiled detection rules; immutable and shareable across threads."""

    lexicon: frozenset[str] = field(default_factory=load_reporter_lexicon)
    versus_tokens: tuple[str, ...] = ("v.",)
    versus_re: re.Pattern = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        alts = "|".join(re.escape(t) for t in sorted(self.versus_tokens, key=len, reverse=True))
        # "vs" without a period must not swallow the start of "vs."
        # Every party alternative starts uppercase; the lookahead skips other positions fast.
        pattern = rf"(?=[A-Z])(?P<left>{_PARTY})\s+(?P<v>(?:{alts})(?![\w.]))\s+(?P<right>{_PARTY})"
        object.__setattr__(self, "versus_re", re.compile(pattern))

    def valid_reporter(self, body: str) -> bool:
        tokens = body.split()
        if any("." in t and not re.fullmatch(_SERIES + r"\.?", t) for t in tokens):
            return True
        lex = self.lexicon
        if any(_lexicon_key(t) in lex for t in tokens if not re.fullmatch(_SERIES, t)):
            return True
        return _lexicon_key(body) in lex


@lru_cache(maxsize=1)
def default_rules() -> CitationRules:
    return CitationRules()


def merge_spans(spans: Iterable[CitationSpan], text: str, gap: re.Pattern | None = None) -> list[CitationSpan]:
    """Merge overlapping or touching spans; with ``gap``, also spans separated by it."""
    out: list[CitationSpan] = []
    for sp in sorted(spans, key=lambda s: (s.start, -s.end)):
        if out:
            last = out[-1]
            joined = sp.start <= last.end or (
                gap is not None and gap.fullmatch(text, last.end, sp.start) is not None
            )
            if joined:
                end = max(last.end, sp.end)
                kind = SpanKind.VERSUS if SpanKind.VERSUS in (last.kind, sp.kind) else SpanKind.REPORTER
                out[-1] = CitationSpan(last.start, end, kind, text[last.start:end])
                continue
        out.append(sp)
    return out


def detect_reporter(
    sentence: str,
    metadata_citations: Sequence[str] = (),
    rules: CitationRules | None = None,
) -> list[CitationSpan]:
    """Reporter-type citations plus exact matches of metadata citation strings."""
    rules = rules or default_rules()
    spans = []
    for cite in metadata_citations:
        cite = cite.strip()
        if len(cite) < 4:
            continue
        i = sentence.find(cite)
        while i != -1:
            spans.append(CitationSpan(i, i + len(cite), SpanKind.REPORTER, cite))
            i = sentence.find(cite, i + len(cite))
    if _DIGIT_RE.search(sentence):
        for m in _REPORTER_RE.finditer(sentence):
            if rules.valid_reporter(m.group("body")):
                spans.append(CitationSpan(m.start(), m.end(), SpanKind.REPORTER, m.group()))
    return merge_spans(spans, sentence, _PARALLEL_GAP_RE)


def _strip_signals(text: str, start: int, end: int) -> int:
    while True:
        m = re.match(r"([A-Z][A-Za-z]*)\.?,?\s+", text[start:end])
        if not m or m.group(1) not in LEADING_SIGNALS or m.end() >= end - start:
            return start
        start += m.end()


def detect_versus(
    sentence: str,
    rules: CitationRules | None = None,
    reporter_spans: Sequence[CitationSpan] | None = None,
) -> list[CitationSpan]:
    """``Party v. Party`` spans, extended over a directly following reporter cite."""
    rules = rules or default_rules()
    if not any(tok in sentence for tok in rules.versus_tokens):
        return []
    if reporter_spans is None:
        reporter_spans = detect_reporter(sentence, rules=rules)
    spans = []
    for m in rules.versus_re.finditer(sentence):
        start = _strip_signals(sentence, m.start("left"), m.end("left"))
        right = m.group("right")
        trail = _TRAILING_CONNECTOR_RE.search(right)
        end = m.end("right") - (len(trail.group()) if trail else 0)
        for rs in reporter_spans:
            if rs.start >= end and _VERSUS_GAP_RE.fullmatch(sentence, end, rs.start):
                end = rs.end
                break
        spans.append(CitationSpan(start, end, SpanKind.VERSUS, sentence[start:end]))
    return spans


def detect_citations(
    sentence: str,
    metadata_citations: Sequence[str] = (),
    rules: CitationRules | None = None,
) -> list[CitationSpan]:
    """Union of reporter and versus spans, merged where they overlap."""
    rules = rules or default_rules()
    reporter = detect_reporter(sentence, metadata_citations, rules)
    versus = detect_versus(sentence, rules, reporter)
    if not versus:
        return reporter
    return merge_spans([*reporter, *versus], sentence)


def is_citation_only(masked: str) -> bool:
    return CITATION_ONLY_RE.match(masked) is not None


def mask_citations(sentence: str, spans: Sequence[CitationSpan]) -> ProcessedSentence:
    """Replace every span with the placeholder and compute the sentence flags."""
    n = len(sentence)
    for sp in spans:
        if not 0 <= sp.start < sp.end <= n:
            raise SpanOutOfBounds(f"span {sp.start}:{sp.end} outside sentence of length {n}")
    merged = merge_spans(spans, sentence)
    if not merged:
        return ProcessedSentence(sentence, sentence, (), False, False)
    parts = []
    pos = 0
    for sp in merged:
        parts.append(sentence[pos:sp.start])
        parts.append(PLACEHOLDER)
        pos = sp.end
    parts.append(sentence[pos:])
    masked = "".join(parts)
    return ProcessedSentence(sentence, masked, tuple(merged), True, is_citation_only(masked))


def process_sentence(
    sentence: str,
    metadata_citations: Sequence[str] = (),
    rules: CitationRules | None = None,
) -> ProcessedSentence:
    return mask_citations(sentence, detect_citations(sentence, metadata_citations, rules))
