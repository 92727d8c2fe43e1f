"""Medication NER ensembling toolkit: subword-to-word grouping, voting and
stacked ensembles over multiple models' outputs, BIO-strict and collapsed
evaluation, and SNOMED-CT/BNF entity linking."""

from medner.core import (
    ENTITY_CLASSES,
    SCHEME,
    Document,
    LabelScheme,
    ModelRun,
    SubwordPrediction,
    WordPrediction,
    argmax,
    collapse_label,
    label_index,
)
from medner.chunking import ChunkSpec, chunk
from medner.grouping import GroupingStrategy, group
from medner.metrics import ClassReport, ConfusionMatrix, EvalMode, confusion, report
from medner.voting import TieBreak, VoteKind, VotePolicy, vote_document, vote_word

__version__ = "0.1.0"

__all__ = [
    "ENTITY_CLASSES",
    "SCHEME",
    "ChunkSpec",
    "ClassReport",
    "ConfusionMatrix",
    "Document",
    "EvalMode",
    "GroupingStrategy",
    "LabelScheme",
    "ModelRun",
    "SubwordPrediction",
    "TieBreak",
    "VoteKind",
    "VotePolicy",
    "WordPrediction",
    "argmax",
    "chunk",
    "collapse_label",
    "confusion",
    "group",
    "label_index",
    "report",
    "vote_document",
    "vote_word",
]
