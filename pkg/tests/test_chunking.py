import numpy as np
import pytest

from medner.chunking import ChunkSpec, chunk

from oracles import oracle_chunk


def words_with_stops(rng, n, stop_rate=0.08):
    return ["." if rng.random() < stop_rate else f"w{i}" for i in range(n)]


class TestChunkExamples:
    def test_short_input_single_chunk(self):
        words = [f"w{i}" for i in range(50)]
        assert chunk(words) == [words]

    def test_stop_after_soft_start_cuts_there(self):
        # 130 words, "." as the 110th word: cut right after it, then the rest
        words = [f"w{i}" for i in range(130)]
        words[109] = "."
        out = chunk(words)
        assert [len(c) for c in out] == [110, 20]
        assert out[0][-1] == "."

    def test_no_stop_falls_back_to_max_len(self):
        words = [f"w{i}" for i in range(260)]
        assert [len(c) for c in chunk(words)] == [128, 128, 4]

    def test_empty_input(self):
        assert chunk([]) == []

    def test_stop_at_soft_start_does_not_qualify(self):
        # boundary exactly at position 100 is not "after the 100th token"
        words = [f"w{i}" for i in range(200)]
        words[99] = "."
        assert [len(c) for c in chunk(words)] == [128, 72]

    def test_stop_at_position_101_qualifies(self):
        words = [f"w{i}" for i in range(200)]
        words[100] = "."
        assert [len(c) for c in chunk(words)] == [101, 99]


class TestChunkProperties:
    def test_lossless_bounded_boundary_preference(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            n = int(rng.integers(0, 600))
            words = words_with_stops(rng, n)
            out = chunk(words)
            flat = [w for c in out for w in c]
            assert flat == words
            assert all(len(c) <= 128 for c in out)
            for c in out[:-1]:
                if len(c) < 128:
                    assert c[-1] == "."
                    assert len(c) > 100

    def test_matches_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(0, 500))
            words = words_with_stops(rng, n, stop_rate=0.15)
            assert chunk(words) == oracle_chunk(words)

    def test_rule_restarts_per_chunk(self):
        # stops at overall 110 and 215: second chunk counts from word 110
        words = [f"w{i}" for i in range(300)]
        words[109] = "."
        words[214] = "."  # position 105 within the second chunk
        assert [len(c) for c in chunk(words)] == [110, 105, 85]


class TestChunkSpec:
    def test_soft_start_must_be_below_max_len(self):
        with pytest.raises(ValueError):
            ChunkSpec(max_len=100, soft_start=100)

    def test_custom_spec(self):
        spec = ChunkSpec(max_len=10, soft_start=5, boundary_token="|")
        words = list("abcde|ghij" "klmnopqrst" "uv")
        out = chunk(words, spec)
        assert [len(c) for c in out] == [6, 10, 6]
        assert out[0][-1] == "|"
