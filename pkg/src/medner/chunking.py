"""Split word sequences into model-sized chunks.

A chunk never exceeds max_len words. When a cut is needed, the first
boundary token (a full stop by default) strictly after the soft_start
position ends the chunk early; otherwise the chunk runs to max_len.
Positions restart at 1 within every chunk.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class ChunkSpec:
    max_len: int = 128
    soft_start: int = 100
    boundary_token: str = "."

    def __post_init__(self):
        if self.max_len <= 0 or self.soft_start <= 0:
            raise ValueError("max_len and soft_start must be positive")
        if self.soft_start >= self.max_len:
            raise ValueError("soft_start must be below max_len")


def chunk(words: Sequence[str], spec: ChunkSpec = ChunkSpec()) -> list[list[str]]:
    """Cut words into chunks of at most spec.max_len.

    While more than max_len words remain, the next chunk ends right after
    the first boundary token at a 1-indexed position in
    (soft_start, max_len], or at max_len when no such boundary exists.
    The final chunk takes whatever is left. Empty input gives no chunks.
    """
    chunks: list[list[str]] = []
    start = 0
    n = len(words)
    while n - start > spec.max_len:
        cut = spec.max_len
        for pos in range(spec.soft_start + 1, spec.max_len + 1):
            if words[start + pos - 1] == spec.boundary_token:
                cut = pos
                break
        chunks.append(list(words[start : start + cut]))
        start += cut
    if start < n:
        chunks.append(list(words[start:]))
    return chunks
