"""Single-round K-set selection for sessions that stop early.

Repeatedly samples w of the still-candidate dimensions, reduces the
projected data to its skyline, runs a small regret-minimizing subroutine
there, and unions the results (by row identity) until K distinct rows are
collected. If every sampled subset happens to cover the user's true key
dimensions, the subset built for those w dimensions is just as good for the
user's actual utility, which is why enough rounds give high confidence.

The w-dimensional subroutine is a pluggable contract (`core=` argument);
the default is greedy insertion by exact worst-case regret, seeded with the
max-sum row and guaranteed to cover every per-dimension maximum when k
allows.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .dataset import Dataset, check_dims, project, skyline
from .preference import _point_regret_lp


@dataclass(frozen=True)
class SubsetRunConfig:
    w: int = 6
    k: int = 7
    K: int = 30
    max_iter: int = 50

    def __post_init__(self):
        if not self.k > self.w >= 1:
            raise ValueError("need k > w >= 1")
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class CoverageReport:
    p_cover: float
    lower_bound: float
    rounds_executed: int
    confidence: float


def coverage_probability(cand_size: int, d_int: int, w: int) -> tuple[Fraction, float]:
    """Probability that a uniform w-subset of cand_size dimensions contains
    all d_int key dimensions, with its closed-form lower bound."""
    if w > cand_size:
        raise ValueError("cannot sample more dimensions than exist")
    if not 1 <= d_int <= w:
        raise ValueError("need 1 <= d_int <= w")
    p = Fraction(math.comb(cand_size - d_int, w - d_int), math.comb(cand_size, w))
    bound = ((w - d_int + 1) / (cand_size - d_int + 1)) ** d_int
    return p, bound


def rounds_for_confidence(p: float, conf: float) -> int:
    """Iterations needed so that at least one covers with probability conf."""
    if not 0 < conf < 1:
        raise ValueError("confidence must be in (0, 1)")
    if p >= 1:
        return 1
    if p <= 0:
        raise ValueError("zero coverage probability can never reach confidence")
    return math.ceil(math.log(1.0 - conf) / math.log(1.0 - p))


def confidence_after(p: float, rounds: int) -> float:
    return 1.0 - (1.0 - p) ** rounds


def single_round_core(Xw: Dataset, k: int) -> list[int]:
    """Greedy max-regret insertion over a (skyline) w-dimensional dataset.

    Returns row positions into Xw, at most k of them. Starts from the
    max-sum row, then repeatedly adds the row whose worst-case regret
    against the current selection is largest (lazy re-evaluation: regrets
    only shrink as the selection grows). When k covers the dimensionality,
    a repair pass swaps the latest picks for any missing per-dimension
    maxima so boundary coverage always holds.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    vals = Xw.values
    n, w = vals.shape
    if n <= k:
        return list(range(n))
    chosen = [int(np.argmax(vals.sum(axis=1)))]
    # Against a single anchor the worst case is a basis-vector utility, so
    # the first sweep has a closed form: 1 - min_j anchor_j / p_j.
    upper = 1.0 - (vals[chosen[0]][None, :] / vals).min(axis=1)
    np.clip(upper, 0.0, 1.0, out=upper)
    upper[chosen[0]] = 0.0
    while len(chosen) < k:
        S = vals[chosen]
        exact = len(chosen) == 1
        best_row, best_val = -1, -1.0
        order = np.argsort(-upper, kind="stable")
        for r in order:
            r = int(r)
            if upper[r] <= best_val:
                break
            val = upper[r] if exact else _point_regret_lp(S, vals[r])
            upper[r] = val
            if val > best_val:
                best_val, best_row = val, r
        chosen.append(best_row)
        upper[best_row] = 0.0

    if k >= w:
        colmax = vals.max(axis=0)
        anchors: list[int] = []
        for j in range(w):
            achievers = np.flatnonzero(vals[:, j] >= colmax[j])
            a = int(achievers[np.argmax(vals[achievers].sum(axis=1))])
            if a not in anchors:
                anchors.append(a)
        missing = [a for a in anchors if a not in chosen]
        if missing:
            # Swap the latest greedy picks (least marginal value) for the
            # canonical per-dimension maxima; k >= w leaves enough room.
            swappable = [r for r in reversed(chosen) if r not in anchors]
            for a in missing:
                chosen.remove(swappable.pop(0))
                chosen.append(a)
    return chosen


SingleRoundFn = Callable[[Dataset, int], list[int]]


def attribute_subset(X: Dataset, cand: Sequence[int], cfg: SubsetRunConfig,
                     rng: np.random.Generator, d_assumed: int = 5,
                     core: SingleRoundFn = single_round_core,
                     ) -> tuple[Dataset, CoverageReport]:
    """Union of per-subset selections, padded or thinned to exactly K rows.

    ``d_assumed`` is the key-count upper bound used for the coverage
    numbers in the report (the true count is unknown at this point).
    """
    cand = check_dims(cand, X.d)
    K = min(cfg.K, X.n)
    if K < cfg.K:
        warnings.warn(f"K={cfg.K} exceeds the {X.n} available rows; capping",
                      RuntimeWarning, stacklevel=2)

    by_origin: dict[int, None] = {}  # insertion-ordered set of origin ids

    def absorb(sub: Dataset, rows: Sequence[int]) -> None:
        for r in rows:
            by_origin.setdefault(int(sub.origin_ids[r]))

    if cfg.w >= len(cand):
        sub = skyline(project(X, cand))
        absorb(sub, core(sub, K))
        rounds = 1
        p_cover, bound = Fraction(1), 1.0
    else:
        rounds = 0
        while len(by_origin) < K and rounds < cfg.max_iter:
            dims = tuple(sorted(int(i) for i in rng.choice(cand, size=cfg.w,
                                                           replace=False)))
            sub = skyline(project(X, dims))
            absorb(sub, core(sub, cfg.k))
            rounds += 1
        d_eff = min(d_assumed, cfg.w)
        p_cover, bound = coverage_probability(len(cand), d_eff, cfg.w)

    origin_to_row = {int(oid): i for i, oid in enumerate(X.origin_ids)}
    rows = [origin_to_row[o] for o in by_origin]
    if len(rows) < K:
        pool = np.setdiff1d(np.arange(X.n), np.array(rows, dtype=int))
        extra = rng.choice(pool, size=K - len(rows), replace=False)
        rows += [int(i) for i in extra]
    elif len(rows) > K:
        keep = rng.choice(len(rows), size=K, replace=False)
        rows = [rows[int(i)] for i in sorted(keep)]
    report = CoverageReport(p_cover=float(p_cover), lower_bound=float(bound),
                            rounds_executed=rounds,
                            confidence=confidence_after(float(p_cover), rounds))
    return X.subset(rows), report
