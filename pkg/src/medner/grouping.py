"""Reduce one model's subword predictions to one prediction per word.

Three strategies:
  first_token  - the word takes its first subword's argmax label.
  max_logit    - the single highest logit over all (subword, label) pairs
                 decides; earlier subword wins value ties, then the lower
                 label index.
  average      - elementwise mean of the word's subword logits, then
                 argmax of the mean.

The representative word-level logits kept for downstream use are the
first subword's (first_token), the winning subword's (max_logit), or the
mean vector (average).
"""

from __future__ import annotations

import enum
from collections import defaultdict

from medner.core import SCHEME, ModelRun, SubwordPrediction, WordPrediction, argmax
from medner.errors import UncoveredWord


class GroupingStrategy(enum.Enum):
    FIRST_TOKEN = "first"
    MAX_LOGIT = "max"
    AVERAGE_LOGIT = "average"


def _collect_by_word(run: ModelRun, n_words: int | None):
    by_word: dict[int, list[SubwordPrediction]] = defaultdict(list)
    for sw in run.subwords:
        by_word[sw.word_index].append(sw)
    if n_words is None:
        n_words = max(by_word) + 1 if by_word else 0
    for i in range(n_words):
        if i not in by_word:
            raise UncoveredWord(
                f"model {run.model_id} doc {run.doc_id}: word {i} has no subwords"
            )
    return by_word, n_words


def group(
    run: ModelRun,
    strategy: GroupingStrategy,
    n_words: int | None = None,
) -> list[WordPrediction]:
    """Word-level predictions for every word covered by the run.

    When n_words is given, every index in 0..n_words-1 must be covered;
    otherwise the word count is inferred from the highest word_index.
    """
    by_word, n_words = _collect_by_word(run, n_words)
    out: list[WordPrediction] = []
    for i in range(n_words):
        subs = by_word[i]
        if strategy is GroupingStrategy.FIRST_TOKEN:
            logits = subs[0].logits
            label = argmax(logits)
        elif strategy is GroupingStrategy.MAX_LOGIT:
            best_sub = subs[0]
            best_val = max(best_sub.logits)
            for sub in subs[1:]:
                val = max(sub.logits)
                if val > best_val:
                    best_sub, best_val = sub, val
            logits = best_sub.logits
            label = argmax(logits)
        elif strategy is GroupingStrategy.AVERAGE_LOGIT:
            k = len(subs)
            logits = tuple(
                sum(sub.logits[j] for sub in subs) / k for j in range(SCHEME.size)
            )
            label = argmax(logits)
        else:
            raise ValueError(f"unknown strategy: {strategy}")
        out.append(WordPrediction(word_index=i, label=label, logits=tuple(logits)))
    return out
