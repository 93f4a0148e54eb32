"""Seeded generators for synthetic case documents, segmentation gold data and PU blobs.

Documents are built from templated legal prose.  A positive "slot" is a
prose sentence followed by a citation-only sentence; a negative slot is a
prose sentence followed by more prose.  Inline-citation sentences are only
placed at the start of a document or right after a citation-only sentence,
so they never turn a labeled slot into an ignored one and the record-level
positive rate equals ``positive_rate`` in expectation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .clean import AbbreviationTable, normalize_abbreviations
from .ingest import case_record, write_jsonl

SURNAMES = (
    "Smith", "Jones", "Miller", "Brown", "Davis", "Wilson", "Anderson", "Taylor", "Thomas",
    "Moore", "Martin", "Jackson", "Thompson", "White", "Harris", "Clark", "Lewis", "Robinson",
    "Walker", "Young", "Allen", "King", "Wright", "Scott", "Green", "Baker", "Adams", "Nelson",
    "Hill", "Campbell", "Mitchell", "Roberts", "Carter", "Phillips", "Evans", "Turner", "Parker",
    "Collins", "Edwards", "Stewart", "Morris", "Murphy", "Cook", "Rogers", "O'Brien", "McDonald",
)
CITIES = ("Chicago", "Springfield", "Peoria", "Rockford", "Joliet", "Aurora", "Decatur", "Elgin")
COMPANY_KINDS = ("Construction", "Coal", "Insurance", "Lumber", "Railroad", "Supply", "Motor", "Trust")

SUBJECTS = (
    "The defendant", "The plaintiff", "The trial court", "The appellate court", "Defendant",
    "Plaintiff", "The jury", "The witness", "The commission", "The board", "The petitioner",
    "The respondent", "The State", "Counsel for the defendant", "The administrator", "The employer",
)
VERBS = (
    "argues that", "contends that", "maintains that", "testified that", "found that",
    "concluded that", "asserts that", "admitted that", "suggests that", "insists that",
)
CLAUSES = (
    "the evidence was insufficient to support the verdict",
    "the contract was never executed by both parties",
    "the notice of appeal was not timely filed",
    "the instructions misstated the applicable law",
    "the statute of limitations had already run",
    "the search was conducted without a valid warrant",
    "the property was conveyed to the grantee in 1952",
    "the lease expired on June 30, 1961",
    "the payments were made in good faith",
    "no objection was raised at trial",
    "the ordinance was not properly enacted",
    "the injuries were caused by a defect in the premises",
    "the deed was delivered before the death of the grantor",
    "the claimant was acting within the scope of his employment",
    "the hearing officer excluded relevant testimony",
    "the complaint failed to state a cause of action",
)
TAILS = ("", "", "", " in his brief", " at the hearing", " on appeal", " before the magistrate", " in the circuit court")
PROPOSITIONS = (
    "a reviewing court will not disturb a verdict unless it is against the manifest weight of the evidence",
    "the burden of proof rests on the party asserting the affirmative of an issue",
    "a motion to dismiss admits all facts well pleaded",
    "the construction of a statute is a question of law",
    "an agent acting within the scope of his authority binds the principal",
    "a party may not complain of an error which he himself invited",
    "the credibility of witnesses is a matter for the trier of fact",
    "a contract must be construed as a whole",
    "the intent of the legislature controls the interpretation of a statute",
    "a judgment entered without jurisdiction is void",
    "the owner of land owes a duty of reasonable care to invitees",
    "an appellate court may affirm on any ground supported by the record",
)
CARRIER_TEMPLATES = (
    "It is well settled that {p}.",
    "It has long been held that {p}.",
    "The rule in this jurisdiction is that {p}.",
    "Our courts have consistently held that {p}.",
    "This court has recognized that {p}.",
    "It is established that {p}.",
)
QUESTIONS = (
    "Was the notice sufficient under the statute?",
    "Did the trial court err in refusing the instruction?",
    "Has the plaintiff shown any prejudice?",
    "What, then, was the effect of the release?",
)
REPORTERS = (
    ("Ill.", 400), ("Ill. 2d", 120), ("Ill. App.", 350), ("Ill. App. 2d", 120), ("Ill. App. 3d", 300),
    ("N.E.", 200), ("N.E.2d", 999), ("N.E. 2d", 999), ("U.S.", 560), ("S. Ct.", 130), ("L. Ed. 2d", 200),
    ("F.2d", 999), ("F. Supp.", 999), ("A.2d", 999), ("P.2d", 999), ("N.W.2d", 999), ("So. 2d", 999),
    ("Pa. Super.", 400), ("Cal. App. 2d", 300), ("S.W.2d", 999), ("Ky.", 300), ("Mass.", 400),
)
COURT_PARENS = ("", "7th Cir. ", "2d Cir. ", "Ill. App. ", "N.D. Ill. ", "D. Mass. ")


class SentenceFactory:
    """Random legal-prose and citation sentences."""

    def __init__(self, rng: random.Random, hard_rate: float = 0.3) -> None:
        self.rng = rng
        self.hard_rate = hard_rate

    def name(self) -> str:
        return self.rng.choice(SURNAMES)

    def party(self) -> str:
        r = self.rng.random()
        if r < 0.25:
            return self.rng.choice(("People", "State", "United States"))
        if r < 0.5:
            return self.name()
        if r < 0.65:
            return f"{self.name()} {self.rng.choice(COMPANY_KINDS)} Co."
        if r < 0.75:
            return f"City of {self.rng.choice(CITIES)}"
        if r < 0.85:
            return f"{self.name()} & {self.name()}, Inc."
        return f"Board of Education of {self.rng.choice(CITIES)}"

    def reporter_cite(self) -> str:
        rep, max_vol = self.rng.choice(REPORTERS)
        vol = self.rng.randint(1, max_vol)
        page = self.rng.randint(1, 1200)
        cite = f"{vol} {rep} {page}"
        if self.rng.random() < 0.3:
            cite += f", {page + self.rng.randint(1, 12)}"
        return cite

    def case_cite(self) -> tuple[str, list[str]]:
        """A full case citation and its reporter strings (for metadata)."""
        reps = [self.reporter_cite()]
        if self.rng.random() < 0.3:
            reps.append(self.reporter_cite())
        text = f"{self.party()} v. {self.party()}, " + ", ".join(reps)
        if self.rng.random() < 0.7:
            text += f" ({self.rng.choice(COURT_PARENS)}{self.rng.randint(1890, 1995)})"
        return text, reps

    def _hard(self, s: str) -> str:
        """Insert one segmentation hazard that keeps the sentence a single sentence."""
        rng = self.rng
        kind = rng.randrange(10)
        body = s[:-1]
        name = self.name()
        if kind == 0:
            return f"{body}, according to Mr. {name}."
        if kind == 1:
            return f"{body}, as {rng.choice('ABCDEFGHJKLMNPRSTW')}. {rng.choice('ABCDEFGHJKLMNPRSTW')}. {name} explained."
        if kind == 2:
            return f"{body} (see Exhibit No. {rng.randint(1, 40)})."
        if kind == 3:
            return f"{body} in St. Louis on {rng.randint(2, 11)} occasions."
        if kind == 4:
            return f"{body}, and the U.S. Attorney did not object."
        if kind == 5:
            return f"{body} under Ill. Rev. Stat. 1965, ch. {rng.randint(1, 120)}, par. {rng.randint(1, 90)}."
        if kind == 6:
            return f"{body}, e.g. the payment of ${rng.randint(10, 9999)}.{rng.randint(10, 99)} (a sum of {rng.randint(2, 9)}.5 percent)."
        if kind == 7:
            return f"{body} at {rng.randint(1, 11)} p.m. on the day in question."
        if kind == 8:
            return f"{body}, and {name} Bros. Inc. was not a party."
        return f'{body}, stating that "the matter is closed."'

    def plain(self) -> str:
        r = self.rng.random()
        if r < 0.06:
            s = self.rng.choice(QUESTIONS)
            return s
        s = f"{self.rng.choice(SUBJECTS)} {self.rng.choice(VERBS)} {self.rng.choice(CLAUSES)}{self.rng.choice(TAILS)}."
        if self.rng.random() < self.hard_rate:
            s = self._hard(s)
        return s

    def carrier(self) -> str:
        s = self.rng.choice(CARRIER_TEMPLATES).format(p=self.rng.choice(PROPOSITIONS))
        if self.rng.random() < self.hard_rate / 2:
            s = self._hard(s)
        return s

    def citation_only(self) -> tuple[str, list[str]]:
        r = self.rng.random()
        if r < 0.15:
            rep = self.reporter_cite()
            return f"{rep}.", [rep]
        cite, reps = self.case_cite()
        if r < 0.6:
            return f"See {cite}.", reps
        return f"{cite}.", reps

    def inline(self) -> tuple[str, list[str]]:
        cite, reps = self.case_cite()
        if self.rng.random() < 0.5:
            return f"In {cite}, the court held that {self.rng.choice(PROPOSITIONS)}.", reps
        return f"The same rule was applied in {cite}.", reps


@dataclass(frozen=True)
class SyntheticConfig:
    n_docs: int = 100
    sentences_per_doc: int = 32
    positive_rate: float = 0.0587
    inline_rate: float = 0.05
    hard_rate: float = 0.3
    paragraph_rate: float = 0.15
    noise_rate: float = 0.02
    jurisdictions: tuple[str, ...] = ("ill", "mass", "ky")
    seed: int = 0


@dataclass
class SyntheticDocument:
    case_id: str
    file_name: str
    jurisdiction: str
    year: int
    sentences: list[str] = field(default_factory=list)
    # Per sentence: "plain", "carrier", "cite_only" or "inline".
    kinds: list[str] = field(default_factory=list)
    separators: list[str] = field(default_factory=list)
    cites: list[str] = field(default_factory=list)

    @property
    def text(self) -> str:
        parts = []
        for s, sep in zip(self.sentences, self.separators):
            parts.append(s)
            parts.append(sep)
        return "".join(parts).rstrip()

    def expected_labels(self) -> list[tuple[int, int]]:
        """(sentence_number, label) pairs the labeler should emit."""
        out = []
        for i, k in enumerate(self.kinds):
            if k in ("cite_only", "inline"):
                continue
            nxt = self.kinds[i + 1] if i + 1 < len(self.kinds) else None
            if nxt == "cite_only":
                out.append((i, 1))
            elif nxt != "inline":
                out.append((i, 0))
        return out

    def record(self) -> dict:
        return case_record(
            self.case_id, [self.text], self.cites, self.jurisdiction, f"{self.year}-06-01", self.file_name
        )


def _noise(rng: random.Random, text: str) -> str:
    r = rng.random()
    if r < 0.4:
        return text[:-1] + f"[*{rng.randint(2, 900)}]" + text[-1]
    if r < 0.7:
        return text[:-1] + f" [{rng.randint(1, 30)}]" + text[-1]
    return text.replace("'", "’")


def generate_document(
    index: int, cfg: SyntheticConfig, rng: random.Random, n_sentences: int | None = None
) -> SyntheticDocument:
    f = SentenceFactory(rng, cfg.hard_rate)
    target = n_sentences or max(3, int(round(rng.gauss(cfg.sentences_per_doc, cfg.sentences_per_doc / 6))))
    doc = SyntheticDocument(
        case_id=str(1_000_000 + index),
        file_name=f"case-{index:07d}",
        jurisdiction=rng.choice(cfg.jurisdictions),
        year=rng.randint(1880, 2010),
    )

    def add(text: str, kind: str) -> None:
        doc.sentences.append(text)
        doc.kinds.append(kind)
        doc.separators.append("\n\n" if rng.random() < cfg.paragraph_rate else " ")

    while len(doc.sentences) < target:
        inline_ok = not doc.kinds or doc.kinds[-1] == "cite_only"
        if inline_ok and rng.random() < cfg.inline_rate * 4:
            text, reps = f.inline()
            add(text, "inline")
            doc.cites += reps
            continue
        if rng.random() < cfg.positive_rate:
            add(f.carrier(), "carrier")
            text, reps = f.citation_only()
            add(text, "cite_only")
            doc.cites += reps
        else:
            text = f.plain()
            if rng.random() < cfg.noise_rate:
                text = _noise(rng, text)
            add(text, "plain")
    return doc


def generate_corpus(cfg: SyntheticConfig) -> Iterator[SyntheticDocument]:
    rng = random.Random(cfg.seed)
    for i in range(cfg.n_docs):
        yield generate_document(i, cfg, rng)


def write_corpus(cfg: SyntheticConfig, path: str | Path) -> list[SyntheticDocument]:
    docs = list(generate_corpus(cfg))
    write_jsonl((d.record() for d in docs), path)
    return docs


# ---------------------------------------------------------------------------
# Segmentation gold data


@dataclass(frozen=True)
class GoldenDocument:
    doc_id: str
    text: str
    spans: tuple[tuple[int, int], ...]

    @property
    def sentences(self) -> list[str]:
        return [self.text[s:e] for s, e in self.spans]


def golden_segmentation_corpus(
    n_docs: int = 50, sentences_per_doc: int = 54, seed: int = 7, table: AbbreviationTable | None = None
) -> list[GoldenDocument]:
    """Documents in cleaned form with known sentence boundaries.

    Each generated sentence is normalized on its own before joining, which
    matches normalizing the joined text because the rewrite is token-local.
    """
    cfg = SyntheticConfig(n_docs=n_docs, sentences_per_doc=sentences_per_doc, positive_rate=0.25, hard_rate=0.6, noise_rate=0.0, seed=seed)
    rng = random.Random(seed)
    out = []
    for i in range(n_docs):
        doc = generate_document(i, cfg, rng, n_sentences=sentences_per_doc)
        del doc.sentences[sentences_per_doc:], doc.separators[sentences_per_doc:]
        text, spans, pos = [], [], 0
        for s, sep in zip(doc.sentences, doc.separators):
            s = normalize_abbreviations(s, table)
            text.append(s)
            spans.append((pos, pos + len(s)))
            pos += len(s)
            text.append(sep)
            pos += len(sep)
        out.append(GoldenDocument(doc.file_name, "".join(text).rstrip(), tuple(spans)))
    return out


# ---------------------------------------------------------------------------
# PU blobs


@dataclass
class PuBlobs:
    X_train: np.ndarray
    s_train: np.ndarray  # observed label: 1 = labeled positive, 0 = unlabeled
    y_train: np.ndarray  # true class
    X_test: np.ndarray
    y_test: np.ndarray


def pu_blobs(
    n: int = 4000,
    dim: int = 10,
    positive_frac: float = 0.3,
    hidden_frac: float = 0.3,
    separation: float = 1.5,
    n_test: int = 4000,
    seed: int = 0,
) -> PuBlobs:
    """Two Gaussian classes; ``hidden_frac`` of train positives are moved into the unlabeled pool."""
    rng = np.random.default_rng(seed)
    mu = np.zeros(dim)
    mu[: max(1, dim // 2)] = separation / np.sqrt(max(1, dim // 2))

    def draw(m: int) -> tuple[np.ndarray, np.ndarray]:
        y = (rng.random(m) < positive_frac).astype(int)
        X = rng.standard_normal((m, dim)) + np.outer(y, mu)
        return X, y

    X, y = draw(n)
    hidden = (y == 1) & (rng.random(n) < hidden_frac)
    s = np.where(hidden, 0, y)
    X_test, y_test = draw(n_test)
    return PuBlobs(X, s, y, X_test, y_test)
