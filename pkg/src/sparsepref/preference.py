"""Utility math: utilities, regret ratios, sparse truths, simulated users.

The maximum regret ratio here is the exact worst case over all nonnegative
linear utilities, obtained by solving one small LP per contending point.
It exists as a verification oracle for the set-selection guarantees, and
doubles as the scoring rule inside the greedy single-round subroutine.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._lp import robust_max
from .dataset import Dataset, Dims, _skyline_mask, check_dims

_SUM_TOL = 1e-9


def _values(X) -> np.ndarray:
    if isinstance(X, Dataset):
        return X.values
    return np.asarray(X, dtype=float)


@dataclass(frozen=True)
class UtilityVector:
    """Nonnegative weights, L1-normalized."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty vector")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > _SUM_TOL:
            raise ValueError("weights must sum to 1")
        w.setflags(write=False)

    @classmethod
    def normalized(cls, weights: Sequence[float]) -> "UtilityVector":
        w = np.asarray(weights, dtype=float)
        s = w.sum()
        if s <= 0:
            raise ValueError("cannot normalize a nonpositive weight vector")
        return cls(w / s)

    @property
    def d(self) -> int:
        return self.weights.size

    @property
    def support(self) -> Dims:
        return tuple(int(i) for i in np.flatnonzero(self.weights > 0))


class AnswerKind(enum.Enum):
    CHOICE = "choice"
    OPT_OUT = "opt_out"
    QUIT = "quit"


@dataclass(frozen=True)
class Answer:
    kind: AnswerKind
    choice: int | None = None

    def __post_init__(self):
        if self.kind is AnswerKind.CHOICE:
            if self.choice is None or self.choice < 0:
                raise ValueError("a choice answer needs a displayed-tuple index")
        elif self.choice is not None:
            raise ValueError(f"{self.kind.value} answers carry no choice index")

    @classmethod
    def choose(cls, index: int) -> "Answer":
        return cls(AnswerKind.CHOICE, index)

    @classmethod
    def opt_out(cls) -> "Answer":
        return cls(AnswerKind.OPT_OUT)

    @classmethod
    def quit(cls) -> "Answer":
        return cls(AnswerKind.QUIT)


@dataclass(frozen=True)
class SimulatedUser:
    """Answers by partial utility over the displayed attributes.

    Quitting is a budget policy, not a preference, so it never originates
    here; the experiment harness injects it.
    """

    truth: UtilityVector
    tie_break: str = "lowest_index"


def utility(u: UtilityVector, p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    if p.shape != (u.d,):
        raise ValueError(f"point of dimension {p.shape} vs utility of dimension {u.d}")
    return float(u.weights @ p)


def partial_utility(u: UtilityVector, dims: Sequence[int], p: Sequence[float]) -> float:
    """Utility restricted to the displayed dimension subset."""
    dims = check_dims(dims, u.d)
    p = np.asarray(p, dtype=float)
    idx = list(dims)
    return float(u.weights[idx] @ p[idx])


def regret_ratio(X, S, u) -> float:
    """1 - (best utility in S) / (best utility in X); invariant to scaling of u."""
    Xv, Sv = _values(X), _values(S)
    w = u.weights if isinstance(u, UtilityVector) else np.asarray(u, dtype=float)
    if Sv.ndim == 1:
        Sv = Sv[None, :]
    if Sv.size == 0:
        raise ValueError("S must be nonempty")
    best_x = float(Xv @ w if Xv.ndim == 1 else (Xv @ w).max())
    best_s = float((Sv @ w).max())
    if best_x <= 0:
        raise ValueError("max utility over X is zero; dataset must be strictly positive")
    return max(0.0, 1.0 - best_s / best_x)


def _point_regret_lp(Sv: np.ndarray, p: np.ndarray) -> float:
    """Worst regret attributable to p: max x s.t. u.q <= 1-x for q in S, u.p = 1, u >= 0."""
    d = p.size
    c = np.zeros(d + 1)
    c[-1] = 1.0
    A_ub = np.hstack([Sv, np.ones((Sv.shape[0], 1))])
    b_ub = np.ones(Sv.shape[0])
    A_eq = np.hstack([p[None, :], np.zeros((1, 1))])
    res = robust_max(c, A_ub, b_ub, A_eq, [1.0])
    if not res.ok:
        # p cannot reach utility 1 while S stays below it: contributes nothing.
        return 0.0
    return min(1.0, max(0.0, res.value))


def max_regret_ratio(X, S) -> float:
    """Exact supremum of the regret ratio over all nonnegative utilities.

    Only skyline points of X can realize the worst case, so the per-point
    LPs are restricted to them.
    """
    Xv, Sv = _values(X), _values(S)
    if Sv.ndim == 1:
        Sv = Sv[None, :]
    if Sv.size == 0:
        raise ValueError("S must be nonempty")
    sky = Xv[_skyline_mask(Xv)]
    in_s = {tuple(row) for row in Sv}
    worst = 0.0
    for p in sky:
        if tuple(p) in in_s:
            continue
        worst = max(worst, _point_regret_lp(Sv, p))
    return worst


def gen_sparse_utility(d: int, d_int: int, rng: np.random.Generator,
                       d_max: int = 5) -> UtilityVector:
    """Exactly d_int strictly positive weights on uniformly chosen dimensions."""
    if d_int > d:
        raise ValueError("d_int cannot exceed d")
    if not 1 <= d_int <= min(d_max, d):
        raise ValueError(f"d_int must be in [1, min(d_max={d_max}, d={d})]")
    support = rng.choice(d, size=d_int, replace=False)
    w = np.zeros(d)
    w[support] = 1.0 - rng.random(d_int)  # uniform on (0, 1]
    return UtilityVector(w / w.sum())


def simulate_answer(user: SimulatedUser, dims: Sequence[int],
                    tuples: np.ndarray) -> Answer:
    """argmax of partial utility, ties to the lowest displayed index; opt-out
    when every displayed tuple scores exactly zero."""
    tuples = np.asarray(tuples, dtype=float)
    if tuples.ndim != 2 or tuples.shape[0] == 0:
        raise ValueError("tuples must be a nonempty s x d array")
    dims = check_dims(dims, user.truth.d)
    idx = list(dims)
    scores = tuples[:, idx] @ user.truth.weights[idx]
    if np.all(scores == 0.0):
        return Answer.opt_out()
    return Answer.choose(int(np.argmax(scores)))
