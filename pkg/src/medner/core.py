"""Canonical label scheme and the shared prediction value types.

The label vocabulary is fixed once and for all here: "O" at index 0, then
the nine medication entity classes in alphabetical order, B before I.
Every file format, one-hot layout, and report in the toolkit depends on
this ordering, so nothing else is allowed to define its own.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from medner.errors import IndexOutOfRange, UnknownLabel

ENTITY_CLASSES = (
    "ADE",
    "Dosage",
    "Drug",
    "Duration",
    "Form",
    "Frequency",
    "Reason",
    "Route",
    "Strength",
)


def _build_labels() -> tuple[str, ...]:
    labels = ["O"]
    for cls in ENTITY_CLASSES:
        labels.append(f"B-{cls}")
        labels.append(f"I-{cls}")
    return tuple(labels)


@dataclass(frozen=True)
class LabelScheme:
    """The ordered 19-label BIO vocabulary and its collapsed 9+O form."""

    labels: tuple[str, ...] = field(default_factory=_build_labels)
    entity_classes: tuple[str, ...] = ENTITY_CLASSES

    def __post_init__(self):
        if len(self.labels) != 2 * len(self.entity_classes) + 1:
            raise ValueError("label scheme must be 2 x classes + O")
        if self.labels[0] != "O":
            raise ValueError("label index 0 must be 'O'")

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def collapsed_labels(self) -> tuple[str, ...]:
        return ("O",) + self.entity_classes

    def label_index(self, label: str) -> int:
        """Canonical index of a label string; raises UnknownLabel otherwise."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(f"unknown label: {label!r}") from None

    def label_string(self, index: int) -> str:
        if not 0 <= index < len(self.labels):
            raise IndexOutOfRange(f"label index out of range: {index}")
        return self.labels[index]

    def collapse_label(self, label_index: int) -> int:
        """Map a BIO label index onto the 9+O collapsed vocabulary.

        O stays O; B-X and I-X both map to X. Collapsed order is
        [O, ADE, Dosage, Drug, Duration, Form, Frequency, Reason, Route,
        Strength].
        """
        if not 0 <= label_index < len(self.labels):
            raise IndexOutOfRange(f"label index out of range: {label_index}")
        if label_index == 0:
            return 0
        return 1 + (label_index - 1) // 2

    def entity_class_of(self, label_index: int) -> Optional[str]:
        """Entity class name of a label index, or None for O."""
        collapsed = self.collapse_label(label_index)
        if collapsed == 0:
            return None
        return self.entity_classes[collapsed - 1]

    def is_begin(self, label_index: int) -> bool:
        return label_index > 0 and (label_index - 1) % 2 == 0


SCHEME = LabelScheme()

O_INDEX = 0


def label_index(label: str, scheme: LabelScheme = SCHEME) -> int:
    return scheme.label_index(label)


def collapse_label(index: int, scheme: LabelScheme = SCHEME) -> int:
    return scheme.collapse_label(index)


def argmax(values: Sequence[float]) -> int:
    """Index of the maximum value; ties resolve to the lowest index.

    This is the single argmax rule used everywhere in the toolkit so that
    every downstream result is deterministic.
    """
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


@dataclass(frozen=True)
class Document:
    """One input text as a word sequence, with optional gold labels.

    Gold corpora are taken as-is: an I-X after O is kept, no BIO chain
    validation.
    """

    doc_id: str
    words: tuple[str, ...]
    gold_labels: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.gold_labels is not None:
            if len(self.gold_labels) != len(self.words):
                raise ValueError(
                    f"doc {self.doc_id}: {len(self.gold_labels)} gold labels "
                    f"for {len(self.words)} words"
                )
            for idx in self.gold_labels:
                if not 0 <= idx < SCHEME.size:
                    raise IndexOutOfRange(f"gold label index {idx} out of range")


@dataclass(frozen=True)
class SubwordPrediction:
    """One subword's text, owning word position, and 19 logits."""

    text: str
    word_index: int
    logits: tuple[float, ...]

    def __post_init__(self):
        if len(self.logits) != SCHEME.size:
            raise ValueError(f"expected {SCHEME.size} logits, got {len(self.logits)}")
        if self.word_index < 0:
            raise ValueError("word_index must be non-negative")


@dataclass(frozen=True)
class ModelRun:
    """One model's subword predictions for one document.

    Subwords of one word are contiguous and word_index values never
    decrease; different tokenizers produce different subword counts, but
    every word must be covered by at least one subword.
    """

    model_id: str
    doc_id: str
    subwords: tuple[SubwordPrediction, ...]

    def __post_init__(self):
        prev = -1
        for sw in self.subwords:
            if sw.word_index < prev:
                raise ValueError(
                    f"model {self.model_id} doc {self.doc_id}: "
                    "word_index values must be non-decreasing"
                )
            prev = sw.word_index


@dataclass(frozen=True)
class WordPrediction:
    """Per-word label after grouping, optionally with word-level logits."""

    word_index: int
    label: int
    logits: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if not 0 <= self.label < SCHEME.size:
            raise IndexOutOfRange(f"label index {self.label} out of range")
        if self.logits is not None and len(self.logits) != SCHEME.size:
            raise ValueError(f"expected {SCHEME.size} logits, got {len(self.logits)}")
