import pytest

from medner.core import ModelRun, SubwordPrediction, label_index
from medner.errors import UncoveredWord
from medner.grouping import GroupingStrategy, group

from conftest import random_run
from oracles import oracle_group_average, oracle_group_first, oracle_group_max

N = 19


def spiked(label, value=5.0, base=0.0):
    logits = [base] * N
    logits[label] = value
    return tuple(logits)


def run_from_words(word_logits, model_id="m", doc_id="d"):
    """word_logits: list (per word) of lists (per subword) of logit vectors."""
    subwords = []
    for w, vectors in enumerate(word_logits):
        for k, vec in enumerate(vectors):
            subwords.append(SubwordPrediction(text=f"w{w}s{k}", word_index=w, logits=tuple(vec)))
    return ModelRun(model_id=model_id, doc_id=doc_id, subwords=tuple(subwords))


class TestFirstToken:
    def test_first_subword_decides(self):
        # "Para ##ce ##tam ##ol": first piece says B-Drug, the rest disagree
        b_drug = label_index("B-Drug")
        other = label_index("I-Form")
        run = run_from_words([[spiked(b_drug), spiked(other), spiked(other), spiked(other)]])
        out = group(run, GroupingStrategy.FIRST_TOKEN)
        assert out[0].label == b_drug
        assert out[0].logits == spiked(b_drug)


class TestMaxLogit:
    def test_highest_logit_across_subwords_wins(self):
        b_drug, i_drug = label_index("B-Drug"), label_index("I-Drug")
        run = run_from_words([[spiked(b_drug, 1.3), spiked(i_drug, 2.1)]])
        out = group(run, GroupingStrategy.MAX_LOGIT)
        assert out[0].label == i_drug
        assert out[0].logits == spiked(i_drug, 2.1)

    def test_tie_earlier_subword_then_lower_label(self):
        a = spiked(7, 2.0)
        b = spiked(3, 2.0)
        out = group(run_from_words([[a, b]]), GroupingStrategy.MAX_LOGIT)
        assert out[0].label == 7  # same peak value, first subword wins
        a2 = [0.0] * N
        a2[2] = a2[9] = 4.0
        out = group(run_from_words([[tuple(a2)]]), GroupingStrategy.MAX_LOGIT)
        assert out[0].label == 2  # within one subword, lower index wins


class TestAverage:
    def test_opposite_logits_cancel_to_o(self):
        v = tuple(float(i + 1) for i in range(N))
        neg = tuple(-x for x in v)
        out = group(run_from_words([[v, neg]]), GroupingStrategy.AVERAGE_LOGIT)
        assert out[0].label == 0
        assert out[0].logits == tuple([0.0] * N)


class TestSharedProperties:
    def test_unanimous_words_agree_across_strategies(self, rng):
        lab = 11
        vectors = [spiked(lab, 3.0 + rng.random()) for _ in range(4)]
        run = run_from_words([vectors])
        for strategy in GroupingStrategy:
            assert group(run, strategy)[0].label == lab

    def test_single_subword_strategies_identical(self, rng):
        run = random_run(rng, n_words=20, max_subwords=1)
        outputs = [group(run, s) for s in GroupingStrategy]
        for a, b in zip(outputs, outputs[1:]):
            for pa, pb in zip(a, b):
                assert pa.label == pb.label
                assert pa.logits == pb.logits

    def test_output_covers_all_words_in_order(self, rng):
        run = random_run(rng, n_words=37)
        for strategy in GroupingStrategy:
            out = group(run, strategy)
            assert [p.word_index for p in out] == list(range(37))

    def test_retained_logits_argmax_equals_label(self, rng):
        from medner.core import argmax

        run = random_run(rng, n_words=25)
        for strategy in (GroupingStrategy.FIRST_TOKEN, GroupingStrategy.MAX_LOGIT):
            for p in group(run, strategy):
                assert argmax(p.logits) == p.label

    def test_uncovered_word_rejected(self):
        run = run_from_words([[spiked(1)]])
        with pytest.raises(UncoveredWord):
            group(run, GroupingStrategy.FIRST_TOKEN, n_words=2)
        # gap in the middle: words 0 and 2 covered, 1 missing
        sw = (
            SubwordPrediction(text="a", word_index=0, logits=spiked(1)),
            SubwordPrediction(text="b", word_index=2, logits=spiked(1)),
        )
        with pytest.raises(UncoveredWord):
            group(ModelRun(model_id="m", doc_id="d", subwords=sw), GroupingStrategy.FIRST_TOKEN)


class TestOracleEquivalence:
    def test_all_strategies_match_brute_force(self, rng):
        for _ in range(300):
            n_sub = int(rng.integers(1, 6))
            vectors = [rng.normal(size=N).tolist() for _ in range(n_sub)]
            run = run_from_words([vectors])

            label, logits = oracle_group_first(vectors)
            got = group(run, GroupingStrategy.FIRST_TOKEN)[0]
            assert (got.label, list(got.logits)) == (label, logits)

            label, logits = oracle_group_max(vectors)
            got = group(run, GroupingStrategy.MAX_LOGIT)[0]
            assert (got.label, list(got.logits)) == (label, logits)

            label, logits = oracle_group_average(vectors)
            got = group(run, GroupingStrategy.AVERAGE_LOGIT)[0]
            assert got.label == label
            assert list(got.logits) == logits
