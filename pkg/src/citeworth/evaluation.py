"""Precision, recall and F1 per class, with macro and micro aggregates.

``micro_f1`` here is the support-weighted mean of per-class F1 scores.  It is
*not* the pooled-count micro average, which equals accuracy for single-label
problems.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def support(self) -> int:
        return self.tp + self.fn

    def flipped(self) -> "ConfusionCounts":
        """Counts with the other class taken as positive."""
        return ConfusionCounts(tp=self.tn, fp=self.fn, fn=self.fp, tn=self.tp)


def confusion(pred: Sequence[int], gold: Sequence[int], positive: int = 1) -> ConfusionCounts:
    if len(pred) != len(gold):
        raise LengthMismatch(f"{len(pred)} predictions for {len(gold)} gold labels")
    tp = fp = fn = tn = 0
    for p, g in zip(pred, gold):
        if p not in (0, 1) or g not in (0, 1):
            raise ValueError(f"labels must be 0 or 1, got {p!r}/{g!r}")
        if p == positive:
            if g == positive:
                tp += 1
            else:
                fp += 1
        elif g == positive:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fp, fn, tn)


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    per_class: Mapping[int, ClassScores]
    macro_f1: float
    micro_f1: float
    # (class, metric) pairs whose denominator was zero and were reported as 0.
    undefined: tuple[tuple[int, str], ...] = field(default=())

    def to_json(self, digits: int = 6) -> dict:
        return {
            "per_class": {
                str(c): {
                    "precision": round(s.precision, digits),
                    "recall": round(s.recall, digits),
                    "f1": round(s.f1, digits),
                    "support": s.support,
                }
                for c, s in sorted(self.per_class.items())
            },
            "macro_f1": round(self.macro_f1, digits),
            "micro_f1": round(self.micro_f1, digits),
            "undefined": [list(u) for u in self.undefined],
        }


def _ratio(num: int, den: int) -> tuple[float, bool]:
    return (num / den, True) if den else (0.0, False)


def class_scores(c: ConfusionCounts) -> tuple[ClassScores, list[str]]:
    p, p_ok = _ratio(c.tp, c.tp + c.fp)
    r, r_ok = _ratio(c.tp, c.tp + c.fn)
    f, f_ok = _ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn)
    missing = [name for name, ok in (("precision", p_ok), ("recall", r_ok), ("f1", f_ok)) if not ok]
    return ClassScores(p, r, f, c.support), missing


def report(counts: Mapping[int, ConfusionCounts]) -> EvalReport:
    per_class = {}
    undefined = []
    for cls, c in sorted(counts.items()):
        scores, missing = class_scores(c)
        per_class[cls] = scores
        undefined += [(cls, m) for m in missing]
    n = len(per_class)
    macro = sum(s.f1 for s in per_class.values()) / n if n else 0.0
    total = sum(s.support for s in per_class.values())
    micro = sum(s.f1 * s.support for s in per_class.values()) / total if total else 0.0
    return EvalReport(per_class, macro, micro, tuple(undefined))


def evaluate(pred: Sequence[int], gold: Sequence[int]) -> EvalReport:
    """Report over both classes of a binary problem."""
    pos = confusion(pred, gold, positive=1)
    return report({0: pos.flipped(), 1: pos})
