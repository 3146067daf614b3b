"""Coarse elimination: screen attributes in disjoint m-sized blocks.

One question per block. A choice keeps the whole block as potentially key;
an opt-out discards it outright. Short last blocks are padded up to m with
already-eliminated dimensions so the display width stays consistent, and
the padding never changes status.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, Dims
from .preference import Answer, AnswerKind


def make_blocks(d: int, m: int) -> list[Dims]:
    """Partition dimensions 0..d-1 into ceil(d/m) consecutive blocks."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if d < 1:
        raise ValueError("d must be at least 1")
    return [tuple(range(i, min(i + m, d))) for i in range(0, d, m)]


@dataclass
class Phase1State:
    blocks: list[Dims]
    m: int
    cursor: int = 0
    kept: list[int] = field(default_factory=list)
    eliminated: list[int] = field(default_factory=list)

    @classmethod
    def start(cls, d: int, m: int) -> "Phase1State":
        return cls(blocks=make_blocks(d, m), m=m)

    @property
    def done(self) -> bool:
        return self.cursor >= len(self.blocks)

    def unprocessed_dims(self) -> list[int]:
        out: list[int] = []
        for block in self.blocks[self.cursor:]:
            out.extend(block)
        return out

    def candidate_dims(self) -> list[int]:
        """Everything not yet proven non-key: kept plus unprocessed blocks."""
        return self.kept + self.unprocessed_dims()


def sample_question_rows(X: Dataset, dims: Dims, s: int,
                         rng: np.random.Generator, attempts: int = 20) -> np.ndarray:
    """s distinct rows, re-sampled a bounded number of times so the displayed
    projections differ; the last draw stands if every attempt collides."""
    if X.n < s:
        raise ValueError(f"need at least s={s} rows, dataset has {X.n}")
    cols = list(dims)
    idx = rng.choice(X.n, size=s, replace=False)
    for _ in range(attempts - 1):
        proj = X.values[np.ix_(idx, cols)]
        if len({tuple(row) for row in proj}) == s:
            break
        idx = rng.choice(X.n, size=s, replace=False)
    return idx


def phase1_next_question(state: Phase1State, X: Dataset, s: int,
                         rng: np.random.Generator) -> tuple[Dims, np.ndarray]:
    """Displayed dimensions (block plus padding) and sampled row indices."""
    if state.done:
        raise IndexError("phase 1 has no blocks left")
    block = state.blocks[state.cursor]
    shown = list(block)
    if len(shown) < state.m:
        # Pad short blocks with the lowest-indexed eliminated dimensions.
        for dim in sorted(state.eliminated):
            if len(shown) == state.m:
                break
            shown.append(dim)
    rows = sample_question_rows(X, tuple(shown), s, rng)
    return tuple(shown), rows


def phase1_apply(state: Phase1State, answer: Answer) -> Phase1State:
    """Keep or discard the current block; padding dimensions are untouched."""
    if state.done:
        raise IndexError("phase 1 already complete")
    if answer.kind is AnswerKind.QUIT:
        raise ValueError("quit is routed by the session, not the phase machine")
    block = state.blocks[state.cursor]
    if answer.kind is AnswerKind.CHOICE:
        state.kept.extend(block)
    else:
        state.eliminated.extend(block)
    state.cursor += 1
    return state
