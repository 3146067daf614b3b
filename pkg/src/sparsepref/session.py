"""Session orchestration: phases, question log, early-stop routing, results.

A session walks coarse elimination, then fine selection, then the pairwise
polytope search, and ends with the single favorite row. A quit at any point
is honored: during the final search it returns the best candidate under the
current utility polytope; earlier it routes the surviving dimensions into
the single-round K-set selection, so limited feedback still yields output.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from . import phase1, phase2, phase3
from .dataset import Dataset, Dims, assert_normalized
from .preference import Answer, AnswerKind
from .single_round import CoverageReport, SubsetRunConfig, attribute_subset

PHASE_COARSE = 1
PHASE_FINE = 2
PHASE_SEARCH = 3
PHASE_DONE = "done"


@dataclass(frozen=True)
class SessionConfig:
    m: int = 7
    s: int = 2
    d_max: int = 5
    K: int = 30
    subset_cfg: SubsetRunConfig = field(default_factory=SubsetRunConfig)
    seed: int | None = None

    def __post_init__(self):
        if self.s < 2:
            raise ValueError("each question must display at least two tuples")
        if self.m < 1 or self.d_max < 1 or self.K < 1:
            raise ValueError("m, d_max, and K must be positive")


@dataclass(frozen=True)
class SessionResult:
    kind: str                     # "favorite" | "regret_set"
    questions_asked: int
    phase_reached: int | str
    identified_keys: Dims
    favorite_row: int | None = None
    set_rows: Dims | None = None
    coverage: CoverageReport | None = None


@dataclass
class QuestionRecord:
    index: int
    phase: int
    dims_shown: Dims
    probe_dims: Dims | None
    rows: tuple[int, ...]
    answer: Answer | None = None


class SessionError(RuntimeError):
    pass


class Session:
    def __init__(self, X: Dataset, cfg: SessionConfig | None = None):
        cfg = cfg or SessionConfig()
        assert_normalized(X)
        if X.n < cfg.s:
            raise SessionError(f"dataset has {X.n} rows; questions need {cfg.s}")
        self.X = X
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.phase: int | str = PHASE_COARSE
        self.p1 = phase1.Phase1State.start(X.d, cfg.m)
        self.p2: phase2.GroupTestState | None = None
        self.p3: phase3.SearchState | None = None
        self.keys: list[int] = []
        self.log: list[QuestionRecord] = []
        self.pending: QuestionRecord | None = None
        self.result: SessionResult | None = None
        self.questions_asked = 0

    # -- state inspection ------------------------------------------------

    @property
    def terminal(self) -> bool:
        return self.result is not None

    def candidate_dims(self) -> list[int]:
        """Dimensions not yet proven non-key, per the active phase."""
        if self.phase == PHASE_COARSE:
            return self.p1.candidate_dims()
        if self.phase == PHASE_FINE:
            return sorted(self.p2.cand + self.p2.keys)
        return sorted(self.keys)

    # -- question flow -----------------------------------------------------

    def current_question(self) -> QuestionRecord:
        if self.terminal:
            raise SessionError("session is terminal; fetch the result instead")
        if self.pending is None:
            self.pending = self._generate_question()
        return self.pending

    def _generate_question(self) -> QuestionRecord:
        if self.phase == PHASE_COARSE:
            dims, rows = phase1.phase1_next_question(self.p1, self.X, self.cfg.s, self.rng)
            probe = self.p1.blocks[self.p1.cursor]
            return QuestionRecord(len(self.log), PHASE_COARSE, dims, probe,
                                  tuple(int(r) for r in rows))
        if self.phase == PHASE_FINE:
            q = phase2.gt_next_question(self.p2, self.X, self.cfg.s, self.cfg.m, self.rng)
            return QuestionRecord(len(self.log), PHASE_FINE, q.shown_dims, q.probe_dims,
                                  tuple(int(r) for r in q.row_indices))
        pair = phase3.ps_next_pair(self.p3, self.rng)
        dims = tuple(sorted(self.keys))
        return QuestionRecord(len(self.log), PHASE_SEARCH, dims, None, pair)

    def allowed_actions(self) -> tuple[str, ...]:
        if self.phase == PHASE_SEARCH:
            return ("choose", "quit")
        return ("choose", "opt_out", "quit")

    def submit_answer(self, answer: Answer) -> "Session":
        if self.terminal:
            raise SessionError("session is terminal; no further answers accepted")
        record = self.current_question()
        if answer.kind is AnswerKind.CHOICE and answer.choice >= len(record.rows):
            raise SessionError(f"choice {answer.choice} out of range for "
                               f"{len(record.rows)} displayed tuples")
        if answer.kind is AnswerKind.OPT_OUT and self.phase == PHASE_SEARCH:
            raise SessionError("the final search only accepts a choice or quit")
        record.answer = answer
        self.log.append(record)
        self.pending = None
        if answer.kind is AnswerKind.QUIT:
            self._finish_on_quit()
            return self
        self.questions_asked += 1
        if self.phase == PHASE_COARSE:
            phase1.phase1_apply(self.p1, answer)
            if self.p1.done:
                self._enter_fine_selection()
        elif self.phase == PHASE_FINE:
            phase2.gt_apply_answer(self.p2, answer)
            if self.p2.done:
                self._enter_search()
        else:
            chosen = record.rows[answer.choice]
            other = record.rows[1 - answer.choice]
            phase3.ps_apply(self.p3, chosen, other)
            if len(self.p3.candidate_rows) == 1:
                self._finish_favorite(self.p3.candidate_rows[0], PHASE_DONE)
        return self

    # -- phase transitions -------------------------------------------------

    def _enter_fine_selection(self) -> None:
        self.phase = PHASE_FINE
        self.p2 = phase2.GroupTestState.start(self.p1.kept, self.p1.eliminated,
                                              self.cfg.d_max)
        if self.p2.done:
            self._enter_search()

    def _enter_search(self) -> None:
        self.keys = sorted(self.p2.keys)
        if len(self.keys) == 0:
            # Nothing mattered to the user; fall back to a K-set over a
            # random w-subset of all dimensions.
            w = min(self.cfg.subset_cfg.w, self.X.d)
            dims = sorted(int(i) for i in self.rng.choice(self.X.d, size=w, replace=False))
            self._finish_regret_set(dims)
            return
        if len(self.keys) == 1:
            # A lone key dimension admits no informative pairwise question.
            col = self.X.values[:, self.keys[0]]
            self._finish_favorite(int(np.argmax(col)), PHASE_DONE)
            return
        self.phase = PHASE_SEARCH
        entries = [(r.dims_shown, r.rows, r.answer) for r in self.log]
        cuts = phase3.harvest_constraints(entries, self.keys, self.X)
        self.p3 = phase3.init_search(self.X, self.keys, cuts)
        if len(self.p3.candidate_rows) == 1:
            self._finish_favorite(self.p3.candidate_rows[0], PHASE_DONE)

    # -- termination ---------------------------------------------------------

    def _finish_on_quit(self) -> None:
        if self.phase == PHASE_SEARCH:
            self._finish_favorite(phase3.ps_result(self.p3, self.rng), PHASE_SEARCH)
        else:
            self._finish_regret_set(self.candidate_dims())

    def _finish_favorite(self, row: int, reached: int | str) -> None:
        self.result = SessionResult(
            kind="favorite", questions_asked=self.questions_asked,
            phase_reached=reached,
            identified_keys=tuple(self.keys), favorite_row=int(row))
        self.phase = PHASE_DONE

    def _finish_regret_set(self, dims: list[int]) -> None:
        subset, report = attribute_subset(
            self.X, tuple(dims), replace(self.cfg.subset_cfg, K=self.cfg.K),
            self.rng, d_assumed=self.cfg.d_max)
        origin_to_row = {int(oid): i for i, oid in enumerate(self.X.origin_ids)}
        rows = tuple(origin_to_row[int(o)] for o in subset.origin_ids)
        self.result = SessionResult(
            kind="regret_set", questions_asked=self.questions_asked,
            phase_reached=self.phase, identified_keys=tuple(self.keys),
            set_rows=rows, coverage=report)
        self.phase = PHASE_DONE

    def session_result(self) -> SessionResult:
        if not self.terminal:
            raise SessionError("session is still in progress")
        return self.result

    # -- snapshots -----------------------------------------------------------

    def snapshot(self) -> dict[str, Any]:
        """JSON-safe state capture; restoring reproduces the pending question."""
        def rec(r: QuestionRecord) -> dict[str, Any]:
            return {
                "index": r.index, "phase": r.phase,
                "dims_shown": list(r.dims_shown),
                "probe_dims": list(r.probe_dims) if r.probe_dims is not None else None,
                "rows": list(r.rows),
                "answer": None if r.answer is None else {
                    "kind": r.answer.kind.value, "choice": r.answer.choice},
            }

        snap: dict[str, Any] = {
            "config": {
                "m": self.cfg.m, "s": self.cfg.s, "d_max": self.cfg.d_max,
                "K": self.cfg.K, "seed": self.cfg.seed,
                "subset": {"w": self.cfg.subset_cfg.w, "k": self.cfg.subset_cfg.k,
                           "K": self.cfg.subset_cfg.K,
                           "max_iter": self.cfg.subset_cfg.max_iter},
            },
            "phase": self.phase,
            "questions_asked": self.questions_asked,
            "rng_state": copy.deepcopy(self.rng.bit_generator.state),
            "log": [rec(r) for r in self.log],
            "pending": rec(self.pending) if self.pending else None,
            "keys": list(self.keys),
            "phase1": {"cursor": self.p1.cursor, "m": self.p1.m,
                       "blocks": [list(b) for b in self.p1.blocks],
                       "kept": list(self.p1.kept),
                       "eliminated": list(self.p1.eliminated)},
            "phase2": None, "phase3": None, "result": None,
        }
        if self.p2 is not None:
            snap["phase2"] = {"cand": list(self.p2.cand), "keys": list(self.p2.keys),
                              "nonkeys": list(self.p2.nonkeys),
                              "d_left": self.p2.d_left,
                              "active": list(self.p2.active),
                              "pending_probe": list(self.p2.pending_probe)}
        if self.p3 is not None:
            snap["phase3"] = {
                "constraints": [list(h) for h in self.p3.polytope.constraints],
                "candidate_rows": list(self.p3.candidate_rows)}
        if self.result is not None:
            r = self.result
            snap["result"] = {
                "kind": r.kind, "questions_asked": r.questions_asked,
                "phase_reached": r.phase_reached,
                "identified_keys": list(r.identified_keys),
                "favorite_row": r.favorite_row,
                "set_rows": list(r.set_rows) if r.set_rows is not None else None,
                "coverage": None if r.coverage is None else {
                    "p_cover": r.coverage.p_cover,
                    "lower_bound": r.coverage.lower_bound,
                    "rounds_executed": r.coverage.rounds_executed,
                    "confidence": r.coverage.confidence}}
        return snap

    @classmethod
    def restore(cls, snap: dict[str, Any], X: Dataset) -> "Session":
        c = snap["config"]
        cfg = SessionConfig(m=c["m"], s=c["s"], d_max=c["d_max"], K=c["K"],
                            seed=c["seed"],
                            subset_cfg=SubsetRunConfig(**c["subset"]))
        s = cls(X, cfg)
        s.phase = snap["phase"]
        s.questions_asked = snap["questions_asked"]
        s.rng.bit_generator.state = snap["rng_state"]

        def unrec(d: dict[str, Any]) -> QuestionRecord:
            ans = d["answer"]
            answer = None if ans is None else Answer(AnswerKind(ans["kind"]), ans["choice"])
            return QuestionRecord(d["index"], d["phase"], tuple(d["dims_shown"]),
                                  tuple(d["probe_dims"]) if d["probe_dims"] is not None else None,
                                  tuple(d["rows"]), answer)

        s.log = [unrec(r) for r in snap["log"]]
        s.pending = unrec(snap["pending"]) if snap["pending"] else None
        s.keys = list(snap["keys"])
        p1 = snap["phase1"]
        s.p1 = phase1.Phase1State(blocks=[tuple(b) for b in p1["blocks"]], m=p1["m"],
                                  cursor=p1["cursor"], kept=list(p1["kept"]),
                                  eliminated=list(p1["eliminated"]))
        if snap["phase2"] is not None:
            p2 = snap["phase2"]
            s.p2 = phase2.GroupTestState(cand=list(p2["cand"]), keys=list(p2["keys"]),
                                         nonkeys=list(p2["nonkeys"]), d_left=p2["d_left"],
                                         active=list(p2["active"]),
                                         pending_probe=list(p2["pending_probe"]))
        if snap["phase3"] is not None:
            p3 = snap["phase3"]
            state = phase3.init_search(X, s.keys)
            state.polytope = phase3.UtilityPolytope(
                len(s.keys), [np.asarray(h, dtype=float) for h in p3["constraints"]])
            state.candidate_rows = list(p3["candidate_rows"])
            s.p3 = state
        if snap["result"] is not None:
            r = snap["result"]
            cov = r["coverage"]
            s.result = SessionResult(
                kind=r["kind"], questions_asked=r["questions_asked"],
                phase_reached=r["phase_reached"],
                identified_keys=tuple(r["identified_keys"]),
                favorite_row=r["favorite_row"],
                set_rows=tuple(r["set_rows"]) if r["set_rows"] is not None else None,
                coverage=None if cov is None else CoverageReport(**cov))
        return s


def create_session(X: Dataset, cfg: SessionConfig | None = None) -> Session:
    return Session(X, cfg)


def current_question(session: Session) -> QuestionRecord:
    return session.current_question()


def submit_answer(session: Session, answer: Answer) -> Session:
    return session.submit_answer(answer)


def session_result(session: Session) -> SessionResult:
    return session.session_result()
