"""Classification reports and confusion matrices over label sequences.

Two evaluation modes: bio_strict keeps all 19 labels apart, collapsed
first merges B-X/I-X into the 9 entity classes (plus O). Metrics follow
the usual conventions: precision TP/(TP+FP), recall TP/(TP+FN), F1 the
harmonic mean, a zero denominator yields 0. Classes with neither gold nor
predicted support are left out of the averages entirely.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from medner.core import SCHEME, LabelScheme
from medner.errors import EmptyInput, IndexOutOfRange, LengthMismatch


class EvalMode(enum.Enum):
    BIO_STRICT = "bio_strict"
    COLLAPSED = "collapsed"


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassReport:
    per_class: dict[str, ClassMetrics]
    macro: tuple[float, float, float]
    weighted: tuple[float, float, float]
    accuracy: float
    total_support: int
    mode: EvalMode = EvalMode.BIO_STRICT
    include_O_in_macro: bool = True

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "include_O_in_macro": self.include_O_in_macro,
            "per_class": {
                name: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for name, m in self.per_class.items()
            },
            "macro": {"precision": self.macro[0], "recall": self.macro[1], "f1": self.macro[2]},
            "weighted": {
                "precision": self.weighted[0],
                "recall": self.weighted[1],
                "f1": self.weighted[2],
            },
            "accuracy": self.accuracy,
            "total_support": self.total_support,
        }


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]  # rows gold, columns predicted

    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def diagonal(self) -> int:
        return sum(self.counts[i][i] for i in range(len(self.labels)))

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "counts": [list(r) for r in self.counts]}


def _check_and_map(
    gold: Sequence[int], pred: Sequence[int], mode: EvalMode, scheme: LabelScheme
) -> tuple[list[int], list[int], tuple[str, ...]]:
    if len(gold) != len(pred):
        raise LengthMismatch(f"{len(gold)} gold labels vs {len(pred)} predictions")
    if len(gold) == 0:
        raise EmptyInput("nothing to evaluate")
    for idx in list(gold) + list(pred):
        if not 0 <= idx < scheme.size:
            raise IndexOutOfRange(f"label index {idx} out of range")
    if mode is EvalMode.COLLAPSED:
        gold = [scheme.collapse_label(i) for i in gold]
        pred = [scheme.collapse_label(i) for i in pred]
        names = scheme.collapsed_labels
    else:
        gold, pred = list(gold), list(pred)
        names = scheme.labels
    return gold, pred, names


def report(
    gold: Sequence[int],
    pred: Sequence[int],
    mode: EvalMode = EvalMode.BIO_STRICT,
    include_O_in_macro: bool = True,
    scheme: LabelScheme = SCHEME,
) -> ClassReport:
    """Per-class P/R/F1/support plus macro, weighted, and accuracy.

    Weighted averages are support-weighted over the included classes and
    always count O; the macro average counts O only when
    include_O_in_macro is set. Accuracy is plain correct/total.
    """
    gold, pred, names = _check_and_map(gold, pred, mode, scheme)
    n_classes = len(names)

    tp = [0] * n_classes
    gold_count = [0] * n_classes
    pred_count = [0] * n_classes
    correct = 0
    for g, p in zip(gold, pred):
        gold_count[g] += 1
        pred_count[p] += 1
        if g == p:
            tp[g] += 1
            correct += 1

    per_class: dict[str, ClassMetrics] = {}
    included: list[int] = []
    for c in range(n_classes):
        if gold_count[c] == 0 and pred_count[c] == 0:
            continue
        included.append(c)
        prec = tp[c] / pred_count[c] if pred_count[c] else 0.0
        rec = tp[c] / gold_count[c] if gold_count[c] else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        per_class[names[c]] = ClassMetrics(prec, rec, f1, gold_count[c])

    macro_set = [c for c in included if include_O_in_macro or c != 0]
    if macro_set:
        macro = tuple(
            sum(getattr(per_class[names[c]], m) for c in macro_set) / len(macro_set)
            for m in ("precision", "recall", "f1")
        )
    else:
        macro = (0.0, 0.0, 0.0)

    total_weight = sum(gold_count[c] for c in included)
    if total_weight:
        weighted = tuple(
            sum(getattr(per_class[names[c]], m) * gold_count[c] for c in included)
            / total_weight
            for m in ("precision", "recall", "f1")
        )
    else:
        weighted = (0.0, 0.0, 0.0)

    return ClassReport(
        per_class=per_class,
        macro=macro,
        weighted=weighted,
        accuracy=correct / len(gold),
        total_support=len(gold),
        mode=mode,
        include_O_in_macro=include_O_in_macro,
    )


def confusion(
    gold: Sequence[int],
    pred: Sequence[int],
    mode: EvalMode = EvalMode.BIO_STRICT,
    scheme: LabelScheme = SCHEME,
) -> ConfusionMatrix:
    """Square count matrix indexed (gold, predicted) in canonical order."""
    gold, pred, names = _check_and_map(gold, pred, mode, scheme)
    n = len(names)
    counts = [[0] * n for _ in range(n)]
    for g, p in zip(gold, pred):
        counts[g][p] += 1
    return ConfusionMatrix(labels=names, counts=tuple(tuple(r) for r in counts))


def render_report(rep: ClassReport) -> str:
    """Plain-text table: per-class rows, then accuracy / macro / weighted."""
    name_width = max([len(n) for n in rep.per_class] + [len("weighted avg")])
    lines = [f"{'':<{name_width}}  {'P':>8} {'R':>8} {'F1':>8} {'support':>8}"]
    for name, m in rep.per_class.items():
        lines.append(
            f"{name:<{name_width}}  {m.precision:>8.4f} {m.recall:>8.4f} "
            f"{m.f1:>8.4f} {m.support:>8}"
        )
    lines.append("")
    lines.append(
        f"{'accuracy':<{name_width}}  {'':>8} {'':>8} {rep.accuracy:>8.4f} "
        f"{rep.total_support:>8}"
    )
    lines.append(
        f"{'macro avg':<{name_width}}  {rep.macro[0]:>8.4f} {rep.macro[1]:>8.4f} "
        f"{rep.macro[2]:>8.4f} {rep.total_support:>8}"
    )
    lines.append(
        f"{'weighted avg':<{name_width}}  {rep.weighted[0]:>8.4f} "
        f"{rep.weighted[1]:>8.4f} {rep.weighted[2]:>8.4f} {rep.total_support:>8}"
    )
    return "\n".join(lines)


def render_confusion(cm: ConfusionMatrix) -> str:
    width = max(max(len(n) for n in cm.labels), 6)
    header = " " * width + "".join(f"{n:>{width}}" for n in cm.labels)
    lines = [header]
    for name, row in zip(cm.labels, cm.counts):
        lines.append(f"{name:<{width}}" + "".join(f"{c:>{width}}" for c in row))
    return "\n".join(lines)
