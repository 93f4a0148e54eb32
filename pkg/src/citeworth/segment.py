"""Rule-based sentence boundary detection for legal prose.

Candidate boundaries are terminal punctuation followed by whitespace and an
uppercase letter, an opening quote or bracket, or a digit that starts a
reporter citation.  Candidates are then vetoed by the no-boundary rules:
initials, abbreviations, numbered list items, and positions inside a
parenthesised group or a detected citation.  A blank line always ends a
sentence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from . import citations
from .clean import AbbreviationTable, CleanOpinion

# Tokens that do not end a sentence even when followed by a capital.
NON_TERMINAL = frozenset({
    "Hon", "Gen", "Gov", "Sen", "Rep", "Messrs", "Prof", "St", "Mt", "Ft", "Rev",
    "Stat", "Ann", "Supp", "App", "Ct", "Cir", "Ass'n", "Assn", "Dept", "Dep't",
    "Univ", "Ave", "Blvd", "Capt", "Lt", "Col", "Sgt", "Cmdr", "Adm", "Atty",
    "Pl", "Def", "Defs", "Pls", "Par", "Subd", "Cl", "Cls", "Subsec", "Sess",
    "Reg", "Regs", "Ord", "Const", "Amend", "Fig", "Tr", "Ry", "Ind", "Cal",
    "Ill", "Pa", "Ky", "Tex", "Mass", "Mich", "Wis", "Fla", "Ga", "Va", "Md",
    "Conn", "Kan", "Minn", "Miss", "Neb", "Okla", "Tenn", "Wash", "Colo",
    "Ariz", "Ark", "Ala", "Del", "Nev", "Vt", "Wyo", "Mont", "Ore", "Mo", "La",
    "Me", "Wm", "Geo", "Chas", "Thos", "Jas", "Jno", "Benj", "Saml", "Wn", "Vs",
    "Stats", "Comp", "Laws", "Pub", "Gen'l", "Rptr", "Super", "Misc", "Div",
    "Prop", "Crim", "Proc", "Evid", "Cas", "Rul", "Gov't", "Mun", "Twp",
})

_TERMINAL_RE = re.compile(r"[.?!]+[\"')\]]*(?=\s|$)")
_PARAGRAPH_RE = re.compile(r"\n[ ]*\n\s*")
_PAREN_RE = re.compile(r"\([^()\n]{0,120}\)")
_WORD_BEFORE_RE = re.compile(r"([\"'(\[]*)(\S*)$")
_INITIALS_RE = re.compile(r"(?:[A-Z]\.)+[A-Z]?")


@dataclass(frozen=True)
class SentenceUnit:
    index: int
    text: str
    span: tuple[int, int]


class _Protected:
    """Sorted, merged character ranges in which no boundary may fall."""

    def __init__(self, ranges: Iterable[tuple[int, int]]) -> None:
        merged: list[list[int]] = []
        for s, e in sorted(ranges):
            if merged and s <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], e)
            else:
                merged.append([s, e])
        self.ranges = merged
        self._i = 0

    def covers(self, pos: int) -> bool:
        # Queries arrive in increasing order.
        r = self.ranges
        while self._i < len(r) and r[self._i][1] <= pos:
            self._i += 1
        return self._i < len(r) and r[self._i][0] < pos


def _is_terminal(text: str, m: re.Match, table: AbbreviationTable, starts: set[int], protected: _Protected) -> bool:
    end = m.end()
    nxt = end
    while nxt < len(text) and text[nxt].isspace():
        nxt += 1
    if nxt < len(text):
        ch = text[nxt]
        if ch.isdigit():
            if nxt not in starts:
                return False
        elif not (ch.isupper() or ch in "\"'(["):
            return False
    if protected.covers(m.start()) or protected.covers(end):
        return False
    cluster = m.group()
    if cluster != ".":
        return True
    lead, word = _WORD_BEFORE_RE.search(text, max(0, m.start() - 40), m.start()).groups()
    if not word:
        return True
    if len(word) == 1 and word.isupper():
        return False
    if _INITIALS_RE.fullmatch(word) and "." in word:
        return False
    if table.is_key(word + ".") or word in NON_TERMINAL:
        return False
    if word.isdigit() and len(word) <= 2:
        before = text[: m.start() - len(word) - len(lead)].rstrip(" ")
        if not before or before[-1] in "\n:;":
            return False
    return True


def _split_paragraph(text: str, offset: int, table: AbbreviationTable, rules: citations.CitationRules) -> list[tuple[int, int]]:
    spans = citations.detect_citations(text, rules=rules)
    starts = {s.start for s in spans}
    protected = _Protected(
        [(s.start, s.end) for s in spans] + [(m.start(), m.end()) for m in _PAREN_RE.finditer(text)]
    )
    cuts = [0]
    for m in _TERMINAL_RE.finditer(text):
        if _is_terminal(text, m, table, starts, protected):
            cuts.append(m.end())
    cuts.append(len(text))
    out = []
    for a, b in zip(cuts, cuts[1:]):
        seg = text[a:b]
        stripped = seg.strip()
        if not stripped:
            continue
        lead = len(seg) - len(seg.lstrip())
        out.append((offset + a + lead, offset + a + lead + len(stripped)))
    return out


def split_text(
    text: str,
    table: AbbreviationTable | None = None,
    rules: citations.CitationRules | None = None,
) -> list[SentenceUnit]:
    table = table or AbbreviationTable.default()
    rules = rules or citations.default_rules()
    spans: list[tuple[int, int]] = []
    pos = 0
    for m in _PARAGRAPH_RE.finditer(text):
        spans += _split_paragraph(text[pos:m.start()], pos, table, rules)
        pos = m.end()
    spans += _split_paragraph(text[pos:], pos, table, rules)

    # Fold fragments shorter than two characters into a neighbour.
    folded: list[list[int]] = []
    pending: int | None = None
    for s, e in spans:
        if e - s < 2:
            if folded:
                folded[-1][1] = e
            elif pending is None:
                pending = s
            continue
        if pending is not None:
            s, pending = pending, None
        folded.append([s, e])
    if pending is not None:
        folded.append([pending, spans[-1][1]])

    return [
        SentenceUnit(i, " ".join(text[s:e].split()), (s, e))
        for i, (s, e) in enumerate(folded)
    ]


def split_sentences(
    clean: CleanOpinion,
    table: AbbreviationTable | None = None,
    rules: citations.CitationRules | None = None,
) -> list[SentenceUnit]:
    return split_text(clean.text, table, rules)
