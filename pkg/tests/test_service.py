import os

import pytest
from fastapi.testclient import TestClient

from medner.core import SCHEME
from medner.linking import load_mapping_csv
from medner.service import create_app, entity_spans, tokenize_with_offsets

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
LETTER = open(os.path.join(FIXTURES, "synthetic_letter.txt"), encoding="utf-8").read()


@pytest.fixture(scope="module")
def client():
    table = load_mapping_csv(os.path.join(FIXTURES, "mapping_fixture.csv"))
    return TestClient(create_app(mapping_table=table))


@pytest.fixture(scope="module")
def bare_client():
    return TestClient(create_app())


class TestTokenization:
    def test_offsets_recover_words(self):
        text = "ab  cd\nef"
        tokens = tokenize_with_offsets(text)
        assert [(w, text[s:e]) for w, s, e in tokens] == [
            ("ab", "ab"), ("cd", "cd"), ("ef", "ef")
        ]

    def test_entity_spans_joins_same_class_runs(self):
        b_drug, i_drug, b_form = (
            SCHEME.label_index("B-Drug"),
            SCHEME.label_index("I-Drug"),
            SCHEME.label_index("B-Form"),
        )
        spans = entity_spans([b_drug, i_drug, 0, b_form, b_drug])
        assert spans == [(0, 2, "Drug"), (3, 4, "Form"), (4, 5, "Drug")]


class TestEndpoints:
    def test_health(self, client):
        r = client.get("/health")
        assert r.status_code == 200
        assert r.json()["status"] == "ok"

    def test_labels_returns_canonical_scheme(self, client):
        r = client.get("/labels")
        assert r.status_code == 200
        assert r.json()["labels"] == list(SCHEME.labels)
        assert len(r.json()["labels"]) == 19

    def test_annotate_synthetic_letter(self, client):
        r = client.post("/annotate", json={"text": LETTER})
        assert r.status_code == 200
        body = r.json()
        assert len(body["words"]) == len(body["labels"])
        drugs = [e for e in body["entities"] if e["class"] == "Drug"]
        assert len(drugs) >= 2
        for e in body["entities"]:
            assert LETTER[e["char_start"]:e["char_end"]] == e["text"]
        # drug entities are linked inline when a table is loaded
        linked = [e for e in drugs if e["link"] and e["link"]["matched"]]
        assert any("paracetamol" in e["text"].lower() for e in linked)

    def test_annotate_strategies_accepted(self, client):
        for strategy in ("first", "max", "average"):
            r = client.post("/annotate", json={"text": "took aspirin today", "strategy": strategy})
            assert r.status_code == 200
            assert r.json()["strategy"] == strategy

    def test_annotate_empty_text_is_400(self, client):
        r = client.post("/annotate", json={"text": "   "})
        assert r.status_code == 400

    def test_annotate_unknown_strategy_is_400(self, client):
        r = client.post("/annotate", json={"text": "x", "strategy": "bogus"})
        assert r.status_code == 400

    def test_link_matched_term(self, client):
        r = client.post("/link", json={"term": "paracetamol", "kb": "snomed"})
        assert r.status_code == 200
        body = r.json()
        assert body["matched"]["snomed_code"] == "322236009"
        assert body["url"] == body["snomed_url"]

    def test_link_bnf_keyword_search_always_available(self, client):
        r = client.post("/link", json={"term": "notadrugatall", "kb": "bnf"})
        assert r.status_code == 200
        body = r.json()
        assert body["matched"] is None
        assert "notadrugatall" in body["url"]

    def test_link_without_table_is_503(self, bare_client):
        r = bare_client.post("/link", json={"term": "paracetamol", "kb": "snomed"})
        assert r.status_code == 503

    def test_link_empty_term_is_400(self, client):
        r = client.post("/link", json={"term": " ", "kb": "snomed"})
        assert r.status_code == 400

    def test_link_bad_kb_is_400(self, client):
        r = client.post("/link", json={"term": "aspirin", "kb": "icd"})
        assert r.status_code == 400


class TestStackedService:
    def test_metanet_drives_the_ensemble_path(self):
        from medner.labeler import DictionaryLabeler
        from medner.stacking import FeatureMode, MetaNet

        labelers = [DictionaryLabeler(model_id="a"), DictionaryLabeler(model_id="b")]
        net = MetaNet(
            input_width=2 * 19, hidden_width=4, seed=0,
            feature_mode=FeatureMode.ONE_HOT, n_models=2,
        )
        app = create_app(labelers=labelers, metanet=net)
        r = TestClient(app).post("/annotate", json={"text": "took aspirin daily"})
        assert r.status_code == 200
        assert r.json()["ensemble"] is True
        assert len(r.json()["labels"]) == 3

    def test_metanet_labeler_count_mismatch_rejected(self):
        from medner.errors import MednerError
        from medner.stacking import MetaNet

        net = MetaNet(input_width=8 * 19, hidden_width=4, seed=0, n_models=8)
        with pytest.raises(MednerError):
            create_app(metanet=net)
