"""Word-level voting across N models.

Two policies:
  majority_or_o - a label needs at least `threshold` votes (default half
                  the models, rounded up); when nothing qualifies the word
                  falls back to "O".
  max_vote      - plurality wins regardless of the count; ties resolve
                  alphabetically or uniformly at random from a seeded
                  generator.

"Alphabetical" compares label strings with "O" sorting after every
B-*/I-* label, so a tie between a real entity label and O keeps the
entity.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from math import ceil
from typing import Optional, Sequence

from medner.core import SCHEME, WordPrediction
from medner.errors import EmptyVote, InvalidVotePolicy, LengthMismatch


class VoteKind(enum.Enum):
    MAJORITY_OR_O = "majority"
    MAX_VOTE = "max"


class TieBreak(enum.Enum):
    ALPHABETICAL = "alphabetical"
    RANDOM = "random"


# Rank of each label index under "alphabetical with O last". All B-* sort
# before all I-* because the strings are compared whole.
_ALPHA_RANK = {
    SCHEME.label_index(lab): rank
    for rank, lab in enumerate(sorted(SCHEME.labels, key=lambda s: (s == "O", s)))
}


def alpha_rank(label_index: int) -> int:
    return _ALPHA_RANK[label_index]


@dataclass
class VotePolicy:
    kind: VoteKind = VoteKind.MAX_VOTE
    threshold: Optional[int] = None
    tie_break: TieBreak = TieBreak.ALPHABETICAL
    seed: int = 0
    _rng: random.Random = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        self._rng = random.Random(self.seed)

    def effective_threshold(self, n: int) -> int:
        return self.threshold if self.threshold is not None else ceil(n / 2)


def vote_word(labels: Sequence[int], policy: VotePolicy) -> int:
    """Combine N models' label indices for one word into one label."""
    n = len(labels)
    if n == 0:
        raise EmptyVote("cannot vote over zero models")
    counts: dict[int, int] = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1

    if policy.kind is VoteKind.MAJORITY_OR_O:
        threshold = policy.effective_threshold(n)
        if threshold > n:
            raise InvalidVotePolicy(f"threshold {threshold} exceeds {n} models")
        qualifying = [lab for lab, c in counts.items() if c >= threshold]
        if not qualifying:
            return 0
        return min(qualifying, key=alpha_rank)

    top = max(counts.values())
    tied = sorted((lab for lab, c in counts.items() if c == top), key=alpha_rank)
    if len(tied) == 1 or policy.tie_break is TieBreak.ALPHABETICAL:
        return tied[0]
    return policy._rng.choice(tied)


def vote_document(
    per_model: Sequence[Sequence[WordPrediction]], policy: VotePolicy
) -> list[WordPrediction]:
    """Position-wise vote_word over aligned per-model word predictions.

    All sequences must agree in length and word_index order. The output
    carries no logits; a vote has none.
    """
    if not per_model:
        raise EmptyVote("no model predictions supplied")
    length = len(per_model[0])
    for preds in per_model[1:]:
        if len(preds) != length:
            raise LengthMismatch(
                f"models disagree on word count: {len(preds)} vs {length}"
            )
    out = []
    for i in range(length):
        word_index = per_model[0][i].word_index
        for preds in per_model[1:]:
            if preds[i].word_index != word_index:
                raise LengthMismatch(f"word_index mismatch at position {i}")
        label = vote_word([preds[i].label for preds in per_model], policy)
        out.append(WordPrediction(word_index=word_index, label=label))
    return out
