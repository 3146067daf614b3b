"""Fine selection: classify surviving dimensions via generalized binary splitting.

The state machine alternates between three probe shapes. With few
candidates left it tests dimensions one at a time (base case). Otherwise it
tests a random 2^alpha group; a negative answer discards the whole group,
a positive one starts a binary search that walks the group down to a single
key dimension, discarding cleared halves as it goes. Halves that were never
tested return to the candidate pool, which is what keeps the question count
inside the generalized-binary-splitting bound.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, Dims
from .phase1 import sample_question_rows
from .preference import Answer, AnswerKind


@dataclass(frozen=True)
class Question:
    """probe_dims is the subset under test; the rest of shown_dims is padding
    drawn from known non-keys."""

    shown_dims: Dims
    probe_dims: Dims
    row_indices: np.ndarray


@dataclass
class GroupTestState:
    cand: list[int]
    keys: list[int] = field(default_factory=list)
    nonkeys: list[int] = field(default_factory=list)
    d_left: int = 5
    active: list[int] = field(default_factory=list)   # binary-search range
    pending_probe: list[int] = field(default_factory=list)

    @classmethod
    def start(cls, cand: list[int], nonkeys: list[int], d_max: int) -> "GroupTestState":
        return cls(cand=list(cand), nonkeys=list(nonkeys), d_left=d_max)

    @property
    def in_binary_search(self) -> bool:
        return bool(self.active)

    @property
    def done(self) -> bool:
        return not self.in_binary_search and (self.d_left == 0 or not self.cand)


def _alpha(cand_size: int, d_left: int) -> int:
    """floor(log2(l / d_left)) with l = cand_size - d_left + 1, exactly."""
    l = cand_size - d_left + 1
    a = 0
    while (1 << (a + 1)) * d_left <= l:
        a += 1
    return a


def gt_next_question(state: GroupTestState, X: Dataset, s: int, m: int,
                     rng: np.random.Generator) -> Question:
    if state.done:
        raise IndexError("group testing already complete")
    if state.in_binary_search:
        half = len(state.active) // 2
        probe = state.active[:half] if half else list(state.active)
    elif len(state.cand) <= 2 * state.d_left - 2:
        probe = [min(state.cand)]  # base case: test one dimension at a time
    else:
        a = _alpha(len(state.cand), state.d_left)
        # 2^alpha can outgrow the display width once most keys are found;
        # the question format allows only m attributes, so cap there.
        size = min(1 << a, m, len(state.cand))
        probe = sorted(int(i) for i in rng.choice(state.cand, size=size, replace=False))
    state.pending_probe = list(probe)
    shown = list(probe)
    pad = m - len(shown)
    if pad > 0 and state.nonkeys:
        take = min(pad, len(state.nonkeys))
        shown += [int(i) for i in rng.choice(state.nonkeys, size=take, replace=False)]
    rows = sample_question_rows(X, tuple(shown), s, rng)
    return Question(tuple(shown), tuple(probe), rows)


def _classify_nonkey(state: GroupTestState, dims: list[int]) -> None:
    for dim in dims:
        state.cand.remove(dim)
        state.nonkeys.append(dim)


def _classify_key(state: GroupTestState, dim: int) -> None:
    state.cand.remove(dim)
    state.keys.append(dim)
    state.d_left -= 1
    if state.d_left == 0 and state.cand:
        # The key budget is exhausted, so everything still unclassified
        # cannot be key; drain it rather than leave dimensions undecided.
        _classify_nonkey(state, list(state.cand))


def gt_apply_answer(state: GroupTestState, answer: Answer) -> GroupTestState:
    if answer.kind is AnswerKind.QUIT:
        raise ValueError("quit is routed by the session, not the phase machine")
    probe = state.pending_probe
    if not probe:
        raise RuntimeError("no probe outstanding; call gt_next_question first")
    state.pending_probe = []
    positive = answer.kind is AnswerKind.CHOICE

    if not state.in_binary_search:
        if not positive:
            _classify_nonkey(state, probe)
        elif len(probe) == 1:
            _classify_key(state, probe[0])
        else:
            state.active = list(probe)
        return state

    # Binary search over the active range; `probe` is its lower half.
    if positive:
        # Untested sibling half returns to the candidate pool untouched.
        state.active = list(probe)
    else:
        _classify_nonkey(state, probe)
        state.active = [d for d in state.active if d not in probe]
    if len(state.active) == 1:
        # The surviving singleton is known positive by construction.
        dim = state.active[0]
        state.active = []
        _classify_key(state, dim)
    return state


def question_bound(c: int, d_left: int) -> int:
    """Worst-case question count for fine selection on c candidates.

    Where the stated decomposition has no valid (p, theta) for the computed
    alpha, falls back to alpha * d_left + c with a warning rather than
    guessing an unstated intent.
    """
    bound, exact = theorem_bound(c, d_left)
    if not exact:
        warnings.warn(
            f"no (p, theta) decomposition for c={c}, d_left={d_left}; "
            f"using the safe bound {bound}", RuntimeWarning, stacklevel=2)
    return bound


def theorem_bound(c: int, d_left: int) -> tuple[int, bool]:
    """(bound, decomposition_exists). See :func:`question_bound`."""
    if d_left < 1:
        raise ValueError("d_left must be at least 1")
    if c < 0:
        raise ValueError("candidate count cannot be negative")
    if c <= 2 * d_left - 2:
        return c, True
    a = _alpha(c, d_left)
    rem = c - (1 << a) * d_left
    p, theta = divmod(rem, 1 << a)
    if 0 <= p < d_left and 0 <= theta < (1 << a):
        return (a + 2) * d_left + p - 1, True
    return a * d_left + c, False
