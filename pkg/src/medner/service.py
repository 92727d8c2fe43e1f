"""Annotation HTTP service.

Endpoints:
  GET  /health   - liveness.
  GET  /labels   - canonical label scheme (19 BIO labels + entity classes).
  POST /annotate - {text, strategy?, ensemble?} -> words, labels, entities
                   with char offsets (Drug entities carry an inline link
                   when a mapping table is loaded).
  POST /link     - {term, kb} -> fuzzy match + KB URL; 503 when no
                   mapping table was configured.

Raw text is labeled by the configured WordLabelers (the demo dictionary
labeler unless replaced); with several labelers their outputs are voted.
All shared state is immutable after startup, so concurrent requests are
safe. When a static directory is supplied the browser UI is served from /.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from medner import linking
from medner.core import SCHEME, WordPrediction
from medner.errors import MednerError
from medner.grouping import GroupingStrategy, group
from medner.labeler import DictionaryLabeler, WordLabeler
from medner.linking import MappingTable
from medner.stacking import MetaNet, predict_words
from medner.voting import TieBreak, VoteKind, VotePolicy, vote_document

_TOKEN = re.compile(r"\S+")


def tokenize_with_offsets(text: str) -> list[tuple[str, int, int]]:
    """Whitespace tokens with (word, char_start, char_end) in the text."""
    return [(m.group(), m.start(), m.end()) for m in _TOKEN.finditer(text)]


def entity_spans(labels: Sequence[int]) -> list[tuple[int, int, str]]:
    """Maximal runs of words sharing a collapsed entity class, as
    (word_start, word_end_exclusive, class)."""
    spans = []
    i, n = 0, len(labels)
    while i < n:
        cls = SCHEME.entity_class_of(labels[i])
        if cls is None:
            i += 1
            continue
        j = i + 1
        while j < n and SCHEME.entity_class_of(labels[j]) == cls:
            j += 1
        spans.append((i, j, cls))
        i = j
    return spans


class AnnotateRequest(BaseModel):
    text: str
    strategy: str = "first"
    ensemble: bool = True


class LinkRequest(BaseModel):
    term: str
    kb: str = "snomed"


def create_app(
    labelers: Optional[Sequence[WordLabeler]] = None,
    mapping_table: Optional[MappingTable] = None,
    metanet: Optional[MetaNet] = None,
    link_threshold: float = 0.8,
    static_dir: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="medner annotation service")
    labelers = list(labelers) if labelers else [DictionaryLabeler()]
    if metanet is not None and metanet.n_models != len(labelers):
        raise MednerError(
            f"metanet expects {metanet.n_models} labelers, {len(labelers)} configured"
        )

    @app.exception_handler(MednerError)
    async def handle_medner_error(request, exc: MednerError):
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "message": str(exc)},
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "labelers": [lb.model_id for lb in labelers]}

    @app.get("/labels")
    def labels():
        return {
            "labels": list(SCHEME.labels),
            "entity_classes": list(SCHEME.entity_classes),
        }

    @app.post("/annotate")
    def annotate(req: AnnotateRequest):
        if not req.text.strip():
            raise HTTPException(status_code=400, detail="text must be non-empty")
        try:
            strategy = GroupingStrategy(req.strategy)
        except ValueError:
            raise HTTPException(
                status_code=400,
                detail=f"unknown strategy {req.strategy!r}; "
                f"expected one of {[s.value for s in GroupingStrategy]}",
            )
        tokens = tokenize_with_offsets(req.text)
        words = [t[0] for t in tokens]
        per_model: list[list[WordPrediction]] = [
            group(lb.label_words(words, doc_id="adhoc"), strategy, n_words=len(words))
            for lb in labelers
        ]
        if req.ensemble and metanet is not None:
            predictions = predict_words(metanet, per_model)
        elif req.ensemble and len(per_model) > 1:
            policy = VotePolicy(kind=VoteKind.MAX_VOTE, tie_break=TieBreak.ALPHABETICAL)
            predictions = vote_document(per_model, policy)
        else:
            predictions = per_model[0]
        label_ids = [p.label for p in predictions]

        entities = []
        for start, end, cls in entity_spans(label_ids):
            entity = {
                "char_start": tokens[start][1],
                "char_end": tokens[end - 1][2],
                "text": req.text[tokens[start][1] : tokens[end - 1][2]],
                "class": cls,
                "label": SCHEME.labels[label_ids[start]],
                "word_start": start,
                "word_end": end,
                "link": None,
            }
            if cls == "Drug" and mapping_table is not None:
                query = " ".join(words[start:end])
                entity["link"] = linking.fuzzy_link(
                    query, mapping_table, threshold=link_threshold
                ).to_dict()
            entities.append(entity)

        return {
            "words": words,
            "labels": [SCHEME.labels[i] for i in label_ids],
            "entities": entities,
            "strategy": strategy.value,
            "ensemble": req.ensemble and (metanet is not None or len(per_model) > 1),
            "model_ids": [lb.model_id for lb in labelers],
        }

    @app.post("/link")
    def link(req: LinkRequest):
        if mapping_table is None:
            raise HTTPException(status_code=503, detail="no mapping table configured")
        if req.kb not in ("snomed", "bnf"):
            raise HTTPException(status_code=400, detail="kb must be 'snomed' or 'bnf'")
        result = linking.fuzzy_link(req.term, mapping_table, threshold=link_threshold)
        payload = result.to_dict()
        payload["kb"] = req.kb
        payload["url"] = payload["snomed_url"] if req.kb == "snomed" else payload["bnf_url"]
        return payload

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
