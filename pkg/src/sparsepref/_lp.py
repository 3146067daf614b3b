"""Small dense linear programs.

Two solver paths share this module. ``tiny_max`` is a hand-rolled two-phase
tableau simplex for the hot loops (regret LPs have at most a dozen rows and
columns, and generic-solver call overhead dominates at that size).
``highs_max`` wraps scipy's HiGHS interface for the larger feasibility
systems where robustness matters more than per-call latency.

All variables are nonnegative; problems are stated as maximizations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_TOL = 1e-9


@dataclass(frozen=True)
class LPResult:
    status: str
    x: np.ndarray | None
    value: float | None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def tiny_max(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, tol: float = _TOL,
             max_pivots: int = 10_000) -> LPResult:
    """Maximize ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    Dense two-phase simplex. Dantzig pricing with a Bland fallback once the
    objective stalls, so degenerate bases cannot cycle forever.
    """
    c = np.asarray(c, dtype=float)
    n = c.size

    A_rows: list[np.ndarray] = []
    b_vals: list[float] = []
    is_eq: list[bool] = []
    if A_ub is not None and len(A_ub) > 0:
        A = np.atleast_2d(np.asarray(A_ub, dtype=float))
        b = np.atleast_1d(np.asarray(b_ub, dtype=float))
        for i in range(A.shape[0]):
            A_rows.append(A[i])
            b_vals.append(b[i])
            is_eq.append(False)
    if A_eq is not None and len(A_eq) > 0:
        A = np.atleast_2d(np.asarray(A_eq, dtype=float))
        b = np.atleast_1d(np.asarray(b_eq, dtype=float))
        for i in range(A.shape[0]):
            A_rows.append(A[i])
            b_vals.append(b[i])
            is_eq.append(True)

    m = len(A_rows)
    if m == 0:
        # Unconstrained besides x >= 0: bounded only if no positive cost.
        if np.any(c > tol):
            return LPResult(UNBOUNDED, None, None)
        return LPResult(OPTIMAL, np.zeros(n), 0.0)

    n_slack = sum(1 for e in is_eq if not e)
    # Column layout: structural | slack | artificial | rhs.
    total = n + n_slack
    T = np.zeros((m, total + 1))
    slack_col = n
    art_rows: list[int] = []
    for i, (row, rhs, eq) in enumerate(zip(A_rows, b_vals, is_eq)):
        T[i, :n] = row
        T[i, -1] = rhs
        if not eq:
            T[i, slack_col] = 1.0
            slack_col += 1
    # Flip rows to keep rhs nonnegative; flipped <= rows lose their slack basis.
    basis = np.full(m, -1, dtype=int)
    need_art: list[int] = []
    sc = n
    for i in range(m):
        if T[i, -1] < 0:
            T[i] = -T[i]
        if not is_eq[i]:
            if T[i, sc] > 0:
                basis[i] = sc
            sc += 1
        if basis[i] < 0:
            need_art.append(i)
    n_art = len(need_art)
    if n_art:
        art = np.zeros((m, n_art))
        for j, i in enumerate(need_art):
            art[i, j] = 1.0
            basis[i] = total + j
        T = np.hstack([T[:, :-1], art, T[:, -1:]])
    width = T.shape[1] - 1

    def pivot(pr: int, pc: int, r: np.ndarray) -> None:
        T[pr] /= T[pr, pc]
        col = T[:, pc].copy()
        col[pr] = 0.0
        np.subtract(T, np.outer(col, T[pr]), out=T)
        r -= r[pc] * T[pr, :-1]
        basis[pr] = pc

    def run(r: np.ndarray, allowed: np.ndarray) -> str:
        # Dantzig pricing at first; permanently switch to Bland's rule after
        # enough pivots that cycling or numerical stalling is plausible.
        bland_after = 8 * (m + width) + 64
        for it in range(max_pivots):
            cand = np.where(allowed & (r > tol))[0]
            if cand.size == 0:
                return OPTIMAL
            if it > bland_after:
                pc = cand[0]
            else:
                pc = cand[np.argmax(r[cand])]
            col = T[:, pc]
            pos = np.where(col > tol)[0]
            if pos.size == 0:
                return UNBOUNDED
            ratios = np.maximum(T[pos, -1], 0.0) / col[pos]
            best = ratios.min()
            tie = pos[ratios <= best + tol]
            pr = tie[np.argmin(basis[tie])]
            pivot(pr, pc, r)
        raise RuntimeError("simplex pivot limit exceeded")

    allowed = np.ones(width, dtype=bool)
    if n_art:
        # Phase 1: maximize minus the artificial sum.
        c1 = np.zeros(width)
        c1[total:] = -1.0
        r = c1.copy()
        for i in range(m):
            if basis[i] >= total:
                r += T[i, :-1]
        status = run(r, allowed)
        if status != OPTIMAL:  # pragma: no cover - phase 1 is always bounded
            raise RuntimeError("phase 1 unbounded")
        art_value = sum(T[i, -1] for i in range(m) if basis[i] >= total)
        if art_value > 1e-7:
            return LPResult(INFEASIBLE, None, None)
        # Drive lingering degenerate artificials out of the basis.
        drop_rows = []
        for i in range(m):
            if basis[i] >= total:
                nz = np.where(np.abs(T[i, :total]) > tol)[0]
                if nz.size:
                    pivot(i, nz[0], r)
                else:
                    drop_rows.append(i)
        if drop_rows:
            keep = [i for i in range(m) if i not in drop_rows]
            T = T[keep]
            basis = basis[keep]
            m = len(keep)
        allowed[total:] = False

    c_full = np.zeros(width)
    c_full[:n] = c
    r = c_full.copy()
    z = 0.0
    for i in range(m):
        if c_full[basis[i]] != 0.0:
            r -= c_full[basis[i]] * T[i, :-1]
            z += c_full[basis[i]] * T[i, -1]
    status = run(r, allowed)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, None)
    x = np.zeros(width)
    for i in range(m):
        x[basis[i]] = T[i, -1]
    xs = np.clip(x[:n], 0.0, None)
    return LPResult(OPTIMAL, xs, float(c @ xs))


def robust_max(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None) -> LPResult:
    """tiny_max with a HiGHS fallback for the rare pathological instance."""
    try:
        return tiny_max(c, A_ub, b_ub, A_eq, b_eq)
    except RuntimeError:
        return highs_max(c, A_ub, b_ub, A_eq, b_eq)


def highs_max(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None,
              bounds=(0, None)) -> LPResult:
    """Maximize via scipy/HiGHS. Same conventions as :func:`tiny_max`."""
    c = np.asarray(c, dtype=float)
    res = linprog(-c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    if res.status == 2:
        return LPResult(INFEASIBLE, None, None)
    if res.status == 3:
        return LPResult(UNBOUNDED, None, None)
    if not res.success:  # pragma: no cover - defensive
        raise RuntimeError(f"LP solver failure: {res.message}")
    return LPResult(OPTIMAL, res.x, float(-res.fun))
