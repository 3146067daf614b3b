"""Final regret minimization on the identified key dimensions.

The unknown utility, restricted to the keys, lives in the simplex
``{u >= 0, sum u = 1}``. Every pairwise choice cuts it with a halfspace
``u . (winner - loser) >= 0``. The search keeps the set of candidate rows
that can still be optimal somewhere in the polytope, pairs up winners
under randomly drawn interior utilities, and stops at a singleton.

Earlier-phase choices are recycled as cuts whenever at least two key
dimensions were on display; with fewer the comparison carries no
information about the weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._lp import OPTIMAL, highs_max, robust_max
from .dataset import Dataset, _skyline_mask, check_dims
from .preference import Answer, AnswerKind

FEAS_TOL = 1e-9
_INTERIOR_SAMPLES = 50


class InconsistentAnswersError(RuntimeError):
    """The choice constraints admit no utility vector: answers contradict."""


@dataclass
class UtilityPolytope:
    """Base simplex in `dim` coordinates cut by ``u . h > 0`` constraints."""

    dim: int
    constraints: list[np.ndarray] = field(default_factory=list)
    _compact_at: int = 24

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("polytope dimension must be at least 1")

    def matrix(self) -> np.ndarray:
        if not self.constraints:
            return np.empty((0, self.dim))
        return np.vstack(self.constraints)

    def add(self, h: np.ndarray) -> None:
        h = np.asarray(h, dtype=float)
        if h.shape != (self.dim,):
            raise ValueError("constraint dimension mismatch")
        self.constraints.append(h)
        if len(self.constraints) >= self._compact_at:
            self.compact()
            self._compact_at = len(self.constraints) + 8

    def compact(self) -> None:
        """Drop constraints implied by the rest; the feasible set is unchanged."""
        kept: list[np.ndarray] = []
        rest = list(self.constraints)
        for i, h in enumerate(self.constraints):
            others = kept + rest[i + 1:]
            if not others:
                kept.append(h)
                continue
            G = np.vstack(others)
            res = robust_max(-h, A_ub=-G, b_ub=np.full(G.shape[0], FEAS_TOL),
                             A_eq=np.ones((1, self.dim)), b_eq=[1.0])
            redundant = res.status == OPTIMAL and -res.value >= -FEAS_TOL
            if not redundant:
                kept.append(h)
        self.constraints = kept

    def feasible(self, extra: np.ndarray | None = None) -> bool:
        G = self.matrix()
        if extra is not None and len(extra):
            G = np.vstack([G, extra]) if G.size else np.atleast_2d(extra)
        if G.size == 0:
            return True
        res = highs_max(np.zeros(self.dim), A_ub=-G, b_ub=np.full(G.shape[0], FEAS_TOL),
                        A_eq=np.ones((1, self.dim)), b_eq=[1.0])
        return res.ok

    def strict_margin(self) -> float:
        """Best achievable min slack over the cut constraints; <= 0 means no
        utility satisfies every cut strictly."""
        G = self.matrix()
        if G.size == 0:
            return 1.0
        k = self.dim
        c = np.zeros(k + 1)
        c[-1] = 1.0
        A_ub = np.hstack([-G, np.ones((G.shape[0], 1))])
        b_ub = np.zeros(G.shape[0])
        A_eq = np.hstack([np.ones((1, k)), np.zeros((1, 1))])
        res = robust_max(c, A_ub, b_ub, A_eq, [1.0])
        if not res.ok:
            return -1.0
        return float(res.value)

    def interior_vector(self, rng: np.random.Generator,
                        samples: int = _INTERIOR_SAMPLES,
                        collect: list[np.ndarray] | None = None) -> np.ndarray:
        """Average of vertices maximizing random objectives: strictly inside
        unless the polytope is degenerate. The vertices land in `collect`
        when given (they are feasible points, useful as certificates)."""
        G = self.matrix()
        A_ub = -G if G.size else None
        b_ub = np.full(G.shape[0], FEAS_TOL) if G.size else None
        A_eq = np.ones((1, self.dim))
        pts = []
        for _ in range(samples):
            c = rng.normal(size=self.dim)
            res = robust_max(c, A_ub, b_ub, A_eq, [1.0])
            if not res.ok:
                raise InconsistentAnswersError("utility polytope is empty")
            pts.append(res.x)
        if collect is not None:
            collect.extend(pts)
        return np.mean(pts, axis=0)


def harvest_constraints(entries: Iterable[tuple[Sequence[int], Sequence[int], Answer]],
                        keys: Sequence[int], X: Dataset) -> list[np.ndarray]:
    """Cuts from earlier-phase choices, one per beaten tuple.

    Each entry is (displayed dims, displayed row indices, answer). Key
    components the question never displayed are zeroed: the user said
    nothing about them. Questions showing fewer than two key dimensions are
    skipped entirely, as are opt-outs.
    """
    keys = check_dims(keys, X.d)
    key_pos = {dim: i for i, dim in enumerate(keys)}
    out: list[np.ndarray] = []
    for dims, rows, answer in entries:
        if answer is None or answer.kind is not AnswerKind.CHOICE:
            continue
        shown_keys = [d for d in dims if d in key_pos]
        if len(shown_keys) < 2:
            continue
        rows = list(rows)
        winner = X.values[rows[answer.choice]]
        for j, row in enumerate(rows):
            if j == answer.choice:
                continue
            h = np.zeros(len(keys))
            for dim in shown_keys:
                h[key_pos[dim]] = winner[dim] - X.values[row][dim]
            if np.any(h != 0.0):
                out.append(h)
    return out


def is_candidate(p: np.ndarray, others: np.ndarray, poly: UtilityPolytope) -> bool:
    """Can p be at least tied-best somewhere in the polytope? LP feasibility
    with strict constraints relaxed to >= within FEAS_TOL."""
    ok, _ = _candidate_witness(p, others, poly)
    return ok


def _feasible_point(G: np.ndarray, dim: int, exact: bool = False) -> np.ndarray | None:
    """A point of {u >= 0, sum u = 1, G u >= -tol}, or None."""
    if G.size == 0:
        return np.full(dim, 1.0 / dim)
    if exact or G.shape[0] > 96:
        res = highs_max(np.zeros(dim), A_ub=-G, b_ub=np.full(G.shape[0], FEAS_TOL),
                        A_eq=np.ones((1, dim)), b_eq=[1.0])
    else:
        res = robust_max(np.zeros(dim), A_ub=-G, b_ub=np.full(G.shape[0], FEAS_TOL),
                       A_eq=np.ones((1, dim)), b_eq=[1.0])
    return res.x if res.ok else None


def _candidate_witness(p: np.ndarray, others: np.ndarray,
                       poly: UtilityPolytope) -> tuple[bool, np.ndarray | None]:
    """Feasibility plus, when feasible, a utility vector certifying it.

    Row generation against the strongest competitors first: infeasibility
    against a subset already proves infeasibility overall, and most
    candidacies are certified after a couple of rounds. Slow convergers
    fall back to one full-system solve.
    """
    p = np.asarray(p, dtype=float)
    others = np.atleast_2d(np.asarray(others, dtype=float))
    base = poly.matrix()
    if others.size == 0:
        u = _feasible_point(base, poly.dim)
        return u is not None, u
    gaps = others - p[None, :]
    working = list(np.argsort(-gaps.sum(axis=1))[: min(12, others.shape[0])])
    for _ in range(5):
        win = p[None, :] - others[working]
        G = np.vstack([base, win]) if base.size else win
        u = _feasible_point(G, poly.dim)
        if u is None:
            return False, None
        margin = others @ u - float(p @ u)
        margin[working] = -np.inf
        viol = np.argsort(-margin)[:4]
        viol = [int(i) for i in viol if margin[int(i)] > FEAS_TOL]
        if not viol:
            return True, u
        working.extend(viol)
    win = p[None, :] - others
    G = np.vstack([base, win]) if base.size else win
    u = _feasible_point(G, poly.dim, exact=True)
    return u is not None, u


@dataclass
class SearchState:
    polytope: UtilityPolytope
    proj: np.ndarray                 # full dataset restricted to the keys
    candidate_rows: list[int]        # row positions still potentially optimal
    last_pair: tuple[int, int] | None = None
    # Feasible utility vectors seen so far; a cached point whose argmax is p
    # certifies p as a candidate without an LP. Filtered as cuts arrive.
    witnesses: list[np.ndarray] = field(default_factory=list)

    _interior_base: np.ndarray | None = None
    _cuts_since_prune: int = 0

    @property
    def candidates(self) -> np.ndarray:
        return self.proj[self.candidate_rows]

    def random_interior(self, rng: np.random.Generator) -> np.ndarray:
        """Fresh random strictly-interior utility vector.

        Anchored at a vertex-averaged center (recomputed only when a new cut
        invalidates it), then randomized with a few hit-and-run steps, which
        keeps the per-question cost flat as cuts accumulate.
        """
        G = self.polytope.matrix()
        base = self._interior_base
        if base is None or (G.size and (G @ base).min() <= FEAS_TOL) \
                or base.min() <= FEAS_TOL:
            vertices: list[np.ndarray] = []
            base = self.polytope.interior_vector(rng, collect=vertices)
            for u in vertices:
                self.remember(u)
            self._interior_base = base
        x = base.copy()
        k = x.size
        for _ in range(6):
            delta = rng.normal(size=k)
            delta -= delta.mean()          # stay on the simplex plane
            norm = np.linalg.norm(delta)
            if norm == 0.0:
                continue
            delta /= norm
            rates = np.concatenate([delta, G @ delta]) if G.size else delta
            levels = np.concatenate([x, G @ x]) if G.size else x
            lo, hi = -np.inf, np.inf
            neg = rates < -1e-14
            pos = rates > 1e-14
            if neg.any():
                hi = (levels[neg] / -rates[neg]).min()
            if pos.any():
                lo = -(levels[pos] / rates[pos]).min()
            if not np.isfinite(lo) or not np.isfinite(hi) or hi - lo <= 0:
                continue
            t = (lo + (hi - lo) * rng.random()) * 0.9
            x = x + t * delta
        return x

    def remember(self, u: np.ndarray | None) -> None:
        if u is not None:
            self.witnesses.append(np.asarray(u, dtype=float))
            if len(self.witnesses) > 256:
                del self.witnesses[: len(self.witnesses) - 256]

    def filter_witnesses(self, h: np.ndarray) -> None:
        self.witnesses = [u for u in self.witnesses if u @ h >= -FEAS_TOL]


def _prune(state: SearchState) -> None:
    rows = state.candidate_rows
    vals = state.proj[rows]
    certified: set[int] = set()
    if state.witnesses:
        scores = vals @ np.asarray(state.witnesses).T   # rows x witnesses
        certified = {rows[int(i)] for i in np.argmax(scores, axis=0)}
    keep = []
    for i, r in enumerate(rows):
        if r in certified:
            keep.append(r)
            continue
        others = state.proj[[q for q in rows if q != r]]
        ok, u = _candidate_witness(state.proj[r], others, state.polytope)
        if ok:
            keep.append(r)
            state.remember(u)
    state.candidate_rows = keep


def init_search(X: Dataset, keys: Sequence[int],
                constraints: Iterable[np.ndarray] = ()) -> SearchState:
    """Candidates start as the de-duplicated skyline of the key projection,
    filtered against any harvested constraints."""
    keys = check_dims(keys, X.d)
    proj = X.values[:, list(keys)]
    mask = _skyline_mask(proj)
    rows = [int(i) for i in np.flatnonzero(mask)]
    seen: dict[tuple, int] = {}
    uniq: list[int] = []
    for r in rows:
        t = tuple(proj[r])
        if t not in seen:
            seen[t] = r
            uniq.append(r)
    poly = UtilityPolytope(len(keys))
    for h in constraints:
        poly.add(h)
    if poly.constraints and not poly.feasible():
        raise InconsistentAnswersError("harvested constraints admit no utility")
    state = SearchState(polytope=poly, proj=proj, candidate_rows=uniq)
    if poly.constraints:
        _prune(state)
    return state


def ps_next_pair(state: SearchState, rng: np.random.Generator) -> tuple[int, int]:
    """Top two candidate rows under a random interior utility."""
    rows = state.candidate_rows
    if len(rows) < 2:
        raise ValueError("search is already terminal")
    if len(rows) == 2:
        pair = (rows[0], rows[1])
    else:
        # Winners under two independent interior utilities. A row that is no
        # longer potentially optimal can never top an interior utility, so
        # both members are genuine candidates even between prunes.
        v1 = state.random_interior(rng)
        v2 = state.random_interior(rng)
        state.remember(v1)
        state.remember(v2)
        s1 = state.candidates @ v1
        a = int(np.argmax(s1))
        b = int(np.argmax(state.candidates @ v2))
        if a == b:
            order = np.argsort(-s1, kind="stable")
            b = int(order[1]) if int(order[0]) == a else int(order[0])
        pair = (rows[a], rows[b])
    state.last_pair = pair
    return pair


def ps_apply(state: SearchState, chosen: int, other: int) -> SearchState:
    """Cut the polytope with the observed preference and re-prune.

    The beaten row is removed outright: the winner is at least as good
    everywhere consistent with the answer, so dropping the loser never
    discards a strictly better favorite, and it guarantees progress.
    """
    if chosen == other:
        raise ValueError("a pair must consist of two distinct rows")
    h = state.proj[chosen] - state.proj[other]
    state.polytope.add(h)
    if state.polytope.strict_margin() <= FEAS_TOL:
        raise InconsistentAnswersError(
            "answers admit no strictly consistent utility vector")
    state.filter_witnesses(h)
    state.candidate_rows = [r for r in state.candidate_rows if r != other]
    # While the set is large, stale entries are harmless (pair selection only
    # surfaces interior-utility winners), so the LP sweep runs on a schedule;
    # near the end it runs every time so termination is detected exactly.
    state._cuts_since_prune += 1
    if len(state.candidate_rows) <= 24 or state._cuts_since_prune >= 8:
        _prune(state)
        state._cuts_since_prune = 0
    state.last_pair = None
    return state


def ps_result(state: SearchState, rng: np.random.Generator) -> int:
    """Best candidate row under a random interior utility; the singleton when
    the search has converged."""
    rows = state.candidate_rows
    if not rows:
        raise RuntimeError("candidate set is empty")
    if len(rows) == 1:
        return rows[0]
    v = state.polytope.interior_vector(rng)
    scores = state.candidates @ v
    return rows[int(np.argmax(scores))]
