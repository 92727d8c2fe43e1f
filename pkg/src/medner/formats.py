"""Line-delimited JSON file formats that carry data between pipeline
stages.

Three kinds of file:
  logit files      - header line naming the model and the canonical label
                     list, then one record per document with subword
                     texts, word indices, and 19 logits each.
  gold files       - one record per document: doc_id, words, label
                     strings. No header.
  word files       - grouped/ensembled word-level predictions: header
                     with model id, label list, and a provenance block
                     (command, config hash, seeds), then one record per
                     document with label strings and optional retained
                     logits.

Serialization is canonical (fixed key order, compact separators, floats
via repr), so serialize -> parse -> serialize reproduces files byte for
byte.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from medner.core import SCHEME, Document, ModelRun, SubwordPrediction, WordPrediction
from medner.errors import FormatError, HeaderMismatch

FORMAT_VERSION = 1


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=True)


def config_hash(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()[:16]


def provenance(command: str, config: dict, seeds: Optional[dict] = None) -> dict:
    return {
        "command": command,
        "config_hash": config_hash(config),
        "seeds": seeds or {},
    }


# ---------------------------------------------------------------------------
# Logit files

def logit_file_lines(model_id: str, runs: Sequence[ModelRun]) -> list[str]:
    header = {
        "format_version": FORMAT_VERSION,
        "kind": "logits",
        "model_id": model_id,
        "labels": list(SCHEME.labels),
    }
    lines = [_dumps(header)]
    for run in runs:
        lines.append(
            _dumps(
                {
                    "doc_id": run.doc_id,
                    "subwords": [
                        {
                            "text": sw.text,
                            "word_index": sw.word_index,
                            "logits": [float(v) for v in sw.logits],
                        }
                        for sw in run.subwords
                    ],
                }
            )
        )
    return lines


def write_logit_file(path: str, model_id: str, runs: Sequence[ModelRun]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(logit_file_lines(model_id, runs)) + "\n")


def parse_logit_lines(lines: Iterable[str]) -> tuple[str, list[ModelRun]]:
    it = iter(lines)
    try:
        header = json.loads(next(it))
    except StopIteration:
        raise FormatError("empty logit file") from None
    if header.get("kind") != "logits":
        raise FormatError(f"not a logit file (kind={header.get('kind')!r})")
    if header.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {header.get('format_version')}")
    if header.get("labels") != list(SCHEME.labels):
        raise HeaderMismatch("logit file label list differs from the canonical scheme")
    model_id = header["model_id"]
    runs: list[ModelRun] = []
    seen: set[str] = set()
    for line in it:
        if not line.strip():
            continue
        rec = json.loads(line)
        doc_id = rec["doc_id"]
        if doc_id in seen:
            raise FormatError(f"document {doc_id!r} appears twice")
        seen.add(doc_id)
        subwords = tuple(
            SubwordPrediction(
                text=sw["text"],
                word_index=sw["word_index"],
                logits=tuple(float(v) for v in sw["logits"]),
            )
            for sw in rec["subwords"]
        )
        runs.append(ModelRun(model_id=model_id, doc_id=doc_id, subwords=subwords))
    return model_id, runs


def parse_logit_file(path: str) -> tuple[str, list[ModelRun]]:
    with open(path, encoding="utf-8") as fh:
        return parse_logit_lines(fh.read().splitlines())


# ---------------------------------------------------------------------------
# Gold files

def gold_file_lines(docs: Sequence[Document]) -> list[str]:
    lines = []
    for doc in docs:
        if doc.gold_labels is None:
            raise FormatError(f"document {doc.doc_id!r} has no gold labels")
        lines.append(
            _dumps(
                {
                    "doc_id": doc.doc_id,
                    "words": list(doc.words),
                    "labels": [SCHEME.labels[i] for i in doc.gold_labels],
                }
            )
        )
    return lines


def write_gold_file(path: str, docs: Sequence[Document]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(gold_file_lines(docs)) + "\n")


def parse_gold_lines(lines: Iterable[str]) -> list[Document]:
    docs = []
    seen: set[str] = set()
    for line in lines:
        if not line.strip():
            continue
        rec = json.loads(line)
        doc_id = rec["doc_id"]
        if doc_id in seen:
            raise FormatError(f"document {doc_id!r} appears twice")
        seen.add(doc_id)
        docs.append(
            Document(
                doc_id=doc_id,
                words=tuple(rec["words"]),
                gold_labels=tuple(SCHEME.label_index(s) for s in rec["labels"]),
            )
        )
    return docs


def parse_gold_file(path: str) -> list[Document]:
    with open(path, encoding="utf-8") as fh:
        return parse_gold_lines(fh.read().splitlines())


# ---------------------------------------------------------------------------
# Word-prediction files

@dataclass(frozen=True)
class WordDoc:
    doc_id: str
    predictions: tuple[WordPrediction, ...]


@dataclass
class WordFile:
    model_id: str
    docs: list[WordDoc]
    provenance: dict = field(default_factory=dict)


def word_file_lines(wf: WordFile) -> list[str]:
    header = {
        "format_version": FORMAT_VERSION,
        "kind": "word_predictions",
        "model_id": wf.model_id,
        "labels": list(SCHEME.labels),
        "provenance": wf.provenance,
    }
    lines = [_dumps(header)]
    for doc in wf.docs:
        rec = {
            "doc_id": doc.doc_id,
            "labels": [SCHEME.labels[p.label] for p in doc.predictions],
        }
        if any(p.logits is not None for p in doc.predictions):
            rec["logits"] = [
                None if p.logits is None else [float(v) for v in p.logits]
                for p in doc.predictions
            ]
        lines.append(_dumps(rec))
    return lines


def write_word_file(path: str, wf: WordFile) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(word_file_lines(wf)) + "\n")


def parse_word_lines(lines: Iterable[str]) -> WordFile:
    it = iter(lines)
    try:
        header = json.loads(next(it))
    except StopIteration:
        raise FormatError("empty word-prediction file") from None
    if header.get("kind") != "word_predictions":
        raise FormatError(f"not a word-prediction file (kind={header.get('kind')!r})")
    if header.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {header.get('format_version')}")
    if header.get("labels") != list(SCHEME.labels):
        raise HeaderMismatch("word file label list differs from the canonical scheme")
    wf = WordFile(model_id=header["model_id"], docs=[], provenance=header.get("provenance", {}))
    seen: set[str] = set()
    for line in it:
        if not line.strip():
            continue
        rec = json.loads(line)
        doc_id = rec["doc_id"]
        if doc_id in seen:
            raise FormatError(f"document {doc_id!r} appears twice")
        seen.add(doc_id)
        logits = rec.get("logits")
        preds = []
        for i, lab in enumerate(rec["labels"]):
            vec = logits[i] if logits is not None else None
            preds.append(
                WordPrediction(
                    word_index=i,
                    label=SCHEME.label_index(lab),
                    logits=None if vec is None else tuple(float(v) for v in vec),
                )
            )
        wf.docs.append(WordDoc(doc_id=doc_id, predictions=tuple(preds)))
    return wf


def parse_word_file(path: str) -> WordFile:
    with open(path, encoding="utf-8") as fh:
        return parse_word_lines(fh.read().splitlines())
