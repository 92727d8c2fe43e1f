import numpy as np
import pytest

from medner.core import ModelRun, SubwordPrediction, WordPrediction

N_LABELS = 19


def random_run(rng, n_words, model_id="m", doc_id="d", max_subwords=5):
    """ModelRun with 1..max_subwords subwords per word, random logits."""
    subwords = []
    for w in range(n_words):
        for k in range(rng.integers(1, max_subwords + 1)):
            subwords.append(
                SubwordPrediction(
                    text=f"w{w}s{k}",
                    word_index=w,
                    logits=tuple(rng.normal(size=N_LABELS).tolist()),
                )
            )
    return ModelRun(model_id=model_id, doc_id=doc_id, subwords=tuple(subwords))


def word_predictions(labels, with_logits=False, rng=None, spike=5.0):
    """WordPrediction list from label indices; optional spiked logits whose
    argmax matches the label."""
    preds = []
    for i, lab in enumerate(labels):
        logits = None
        if with_logits:
            base = rng.normal(size=N_LABELS) if rng is not None else np.zeros(N_LABELS)
            base[lab] = base.max() + spike
            logits = tuple(base.tolist())
        preds.append(WordPrediction(word_index=i, label=int(lab), logits=logits))
    return preds


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def pytest_runtest_logreport(report):
    # one visible PASS/FAIL line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        status = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        print(f"\nACCEPTANCE {status}: {name}")
