"""Word labelers for annotating raw text in the HTTP service.

Real transformer inference stays outside this toolkit; logits normally
arrive through logit files. The service still needs something to label
pasted text with, so it takes any object satisfying WordLabeler. The
shipped implementation is a dictionary/pattern labeler good enough for
demos and UI work: a lexicon maps normalized words to entity classes,
a few regexes catch strengths, dosages, and frequencies, and consecutive
same-class words receive B-/I- prefixes.

Labelers emit a ModelRun (one subword per word, spiked logits at the
chosen label) so annotation runs through exactly the same grouping and
voting code paths as file-based predictions.
"""

from __future__ import annotations

import json
import re
from typing import Protocol, Sequence

from medner.core import SCHEME, ModelRun, SubwordPrediction

LABEL_SPIKE = 8.0


class WordLabeler(Protocol):
    model_id: str

    def label_words(self, words: Sequence[str], doc_id: str) -> ModelRun: ...


# Small demo lexicon: word -> entity class.
DEMO_LEXICON = {
    "paracetamol": "Drug",
    "acetaminophen": "Drug",
    "amoxicillin": "Drug",
    "trihydrate": "Drug",
    "aspirin": "Drug",
    "ibuprofen": "Drug",
    "metformin": "Drug",
    "atorvastatin": "Drug",
    "simvastatin": "Drug",
    "warfarin": "Drug",
    "omeprazole": "Drug",
    "lansoprazole": "Drug",
    "ramipril": "Drug",
    "amlodipine": "Drug",
    "bisoprolol": "Drug",
    "codeine": "Drug",
    "morphine": "Drug",
    "insulin": "Drug",
    "prednisolone": "Drug",
    "salbutamol": "Drug",
    "levothyroxine": "Drug",
    "tablet": "Form",
    "tablets": "Form",
    "capsule": "Form",
    "capsules": "Form",
    "inhaler": "Form",
    "patch": "Form",
    "cream": "Form",
    "syrup": "Form",
    "injection": "Form",
    "oral": "Route",
    "orally": "Route",
    "intravenous": "Route",
    "iv": "Route",
    "subcutaneous": "Route",
    "topical": "Route",
    "inhaled": "Route",
    "daily": "Frequency",
    "nightly": "Frequency",
    "weekly": "Frequency",
    "od": "Frequency",
    "bd": "Frequency",
    "tds": "Frequency",
    "qds": "Frequency",
    "prn": "Frequency",
    "rash": "ADE",
    "nausea": "ADE",
    "vomiting": "ADE",
    "dizziness": "ADE",
    "drowsiness": "ADE",
    "headache": "Reason",
    "pain": "Reason",
    "fever": "Reason",
    "hypertension": "Reason",
    "infection": "Reason",
}

_STRENGTH = re.compile(r"^\d+(\.\d+)?\s*(mg|mcg|microgram(s)?|g|ml|units?|%)$", re.I)
_DOSAGE = re.compile(r"^(\d+|one|two|three|half)$", re.I)
_FREQUENCY = re.compile(r"^(twice|once|\d+x)$", re.I)
_DURATION = re.compile(r"^(days?|weeks?|months?)$", re.I)
_PUNCT = re.compile(r"^\W+|\W+$")


def _clean(word: str) -> str:
    return _PUNCT.sub("", word).lower()


class DictionaryLabeler:
    """Lexicon + pattern labeler; the default raw-text annotation hook."""

    def __init__(self, lexicon: dict[str, str] | None = None, model_id: str = "demo-lexicon"):
        self.model_id = model_id
        self.lexicon = {k.lower(): v for k, v in (lexicon or DEMO_LEXICON).items()}
        for cls in self.lexicon.values():
            if cls not in SCHEME.entity_classes:
                raise ValueError(f"lexicon names unknown entity class: {cls!r}")

    def _classify(self, word: str) -> str | None:
        w = _clean(word)
        if not w:
            return None
        if w in self.lexicon:
            return self.lexicon[w]
        if _STRENGTH.match(w):
            return "Strength"
        if _DOSAGE.match(w):
            return "Dosage"
        if _FREQUENCY.match(w):
            return "Frequency"
        if _DURATION.match(w):
            return "Duration"
        return None

    def label_words(self, words: Sequence[str], doc_id: str = "adhoc") -> ModelRun:
        subwords = []
        prev_class: str | None = None
        for i, word in enumerate(words):
            cls = self._classify(word)
            if cls is None:
                label = 0
            elif cls == prev_class:
                label = SCHEME.label_index(f"I-{cls}")
            else:
                label = SCHEME.label_index(f"B-{cls}")
            prev_class = cls
            logits = [0.0] * SCHEME.size
            logits[label] = LABEL_SPIKE
            subwords.append(
                SubwordPrediction(text=word, word_index=i, logits=tuple(logits))
            )
        return ModelRun(model_id=self.model_id, doc_id=doc_id, subwords=tuple(subwords))


def load_lexicon(path: str) -> dict[str, str]:
    """Read a {word: entity class} JSON lexicon."""
    with open(path, encoding="utf-8") as fh:
        lex = json.load(fh)
    if not isinstance(lex, dict):
        raise ValueError(f"{path}: lexicon must be a JSON object")
    return lex
