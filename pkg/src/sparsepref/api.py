"""HTTP/JSON session service for interactive clients.

Questions carry a monotonically increasing ``question_index`` that answers
must echo, so a double-click cannot consume two answers. Idle sessions
expire after a TTL and are treated as having quit: the user's effort is
converted into the K-set result rather than discarded.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse
from pydantic import BaseModel, Field

from .dataset import Dataset, RawTable
from .preference import Answer
from .session import Session, SessionConfig, SessionError
from .single_round import SubsetRunConfig

DEFAULT_TTL_SECONDS = 3600.0


@dataclass
class RegisteredDataset:
    name: str
    dataset: Dataset
    # Raw table rows indexed by origin id, for human-readable display.
    raw: RawTable | None = None


@dataclass
class _LiveSession:
    session_id: str
    session: Session
    dataset: RegisteredDataset
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_touch: float = field(default_factory=time.monotonic)
    expired: bool = False


class ConfigPatch(BaseModel):
    m: int | None = Field(default=None, ge=1)
    s: int | None = Field(default=None, ge=2)
    d_max: int | None = Field(default=None, ge=1)
    K: int | None = Field(default=None, ge=1)
    w: int | None = Field(default=None, ge=1)
    k: int | None = Field(default=None, ge=2)
    max_iter: int | None = Field(default=None, ge=1)
    seed: int | None = None


class CreateSessionBody(BaseModel):
    dataset: str
    config: ConfigPatch | None = None


class AnswerBody(BaseModel):
    question_index: int
    action: str
    choice: int | None = None


def _build_config(patch: ConfigPatch | None) -> SessionConfig:
    cfg = SessionConfig()
    if patch is None:
        return cfg
    sub = cfg.subset_cfg
    sub = SubsetRunConfig(
        w=patch.w if patch.w is not None else sub.w,
        k=patch.k if patch.k is not None else sub.k,
        K=patch.K if patch.K is not None else sub.K,
        max_iter=patch.max_iter if patch.max_iter is not None else sub.max_iter)
    return SessionConfig(
        m=patch.m if patch.m is not None else cfg.m,
        s=patch.s if patch.s is not None else cfg.s,
        d_max=patch.d_max if patch.d_max is not None else cfg.d_max,
        K=patch.K if patch.K is not None else cfg.K,
        subset_cfg=sub,
        seed=patch.seed)


def create_app(registry: dict[str, RegisteredDataset] | None = None,
               ttl_seconds: float = DEFAULT_TTL_SECONDS) -> FastAPI:
    app = FastAPI(title="sparsepref", version="0.1.0")
    datasets: dict[str, RegisteredDataset] = registry if registry is not None else {}
    sessions: dict[str, _LiveSession] = {}
    sessions_lock = threading.Lock()

    def get_live(session_id: str) -> _LiveSession:
        with sessions_lock:
            live = sessions.get(session_id)
        if live is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return live

    def touch_and_expire(live: _LiveSession) -> None:
        now = time.monotonic()
        if (not live.session.terminal and not live.expired
                and now - live.last_touch > ttl_seconds):
            live.expired = True
            live.session.submit_answer(Answer.quit())
        live.last_touch = now

    def question_payload(live: _LiveSession) -> dict[str, Any]:
        s = live.session
        record = s.current_question()
        ds = live.dataset.dataset
        names = [ds.attribute_names[i] for i in record.dims_shown]
        tuples = [[float(v) for v in ds.values[r, list(record.dims_shown)]]
                  for r in record.rows]
        raw_tuples = None
        if live.dataset.raw is not None:
            raw_tuples = []
            for r in record.rows:
                src = int(ds.origin_ids[r])
                raw_tuples.append(
                    [live.dataset.raw.cells[src][i] for i in record.dims_shown])
        return {
            "type": "question",
            "session_id": live.session_id,
            "question_index": record.index,
            "phase": record.phase,
            "attributes": names,
            "tuples": tuples,
            "raw_tuples": raw_tuples,
            "allowed_actions": list(s.allowed_actions()),
            "questions_answered": s.questions_asked,
        }

    def result_payload(live: _LiveSession) -> dict[str, Any]:
        s = live.session
        r = s.session_result()
        ds = live.dataset.dataset

        def render_row(row: int) -> dict[str, Any]:
            out = {"origin_id": int(ds.origin_ids[row]),
                   "values": {n: float(v) for n, v in
                              zip(ds.attribute_names, ds.values[row])}}
            if live.dataset.raw is not None:
                src = int(ds.origin_ids[row])
                out["raw_values"] = {n: live.dataset.raw.cells[src][i]
                                     for i, n in enumerate(ds.attribute_names)}
            return out

        body: dict[str, Any] = {
            "type": "result",
            "session_id": live.session_id,
            "kind": r.kind,
            "diagnostics": {
                "questions_asked": r.questions_asked,
                "phase_reached": r.phase_reached,
                "identified_keys": [ds.attribute_names[i] for i in r.identified_keys],
                "expired": live.expired,
            },
        }
        if r.kind == "favorite":
            body["favorite"] = render_row(r.favorite_row)
        else:
            body["tuples"] = [render_row(i) for i in r.set_rows]
            cov = r.coverage
            body["diagnostics"]["coverage"] = None if cov is None else {
                "p_cover": cov.p_cover, "lower_bound": cov.lower_bound,
                "rounds_executed": cov.rounds_executed,
                "confidence": cov.confidence,
            }
        return body

    @app.get("/datasets")
    def list_datasets() -> dict[str, Any]:
        return {"datasets": [
            {"name": d.name, "rows": d.dataset.n, "attributes": d.dataset.d}
            for d in datasets.values()]}

    @app.post("/sessions", status_code=201)
    def create_session_ep(body: CreateSessionBody) -> dict[str, Any]:
        reg = datasets.get(body.dataset)
        if reg is None:
            raise HTTPException(404, f"unknown dataset {body.dataset!r}")
        try:
            cfg = _build_config(body.config)
            session = Session(reg.dataset, cfg)
        except (ValueError, SessionError) as exc:
            raise HTTPException(422, str(exc))
        session_id = uuid.uuid4().hex
        live = _LiveSession(session_id=session_id, session=session, dataset=reg)
        with sessions_lock:
            sessions[session_id] = live
        with live.lock:
            return question_payload(live)

    @app.get("/sessions/{session_id}/question")
    def get_question(session_id: str) -> dict[str, Any]:
        live = get_live(session_id)
        with live.lock:
            touch_and_expire(live)
            if live.session.terminal:
                return result_payload(live)
            return question_payload(live)

    @app.post("/sessions/{session_id}/answer")
    def post_answer(session_id: str, body: AnswerBody) -> dict[str, Any]:
        live = get_live(session_id)
        with live.lock:
            touch_and_expire(live)
            s = live.session
            if s.terminal:
                if body.action == "quit":
                    return result_payload(live)
                raise HTTPException(409, "session already finished")
            record = s.current_question()
            if body.question_index != record.index:
                raise HTTPException(
                    409, f"question {body.question_index} is stale; "
                         f"current is {record.index}")
            if body.action == "choose":
                if body.choice is None or not 0 <= body.choice < len(record.rows):
                    raise HTTPException(422, "choose needs a valid tuple index")
                answer = Answer.choose(body.choice)
            elif body.action == "opt_out":
                answer = Answer.opt_out()
            elif body.action == "quit":
                answer = Answer.quit()
            else:
                raise HTTPException(422, f"unknown action {body.action!r}")
            try:
                s.submit_answer(answer)
            except SessionError as exc:
                raise HTTPException(422, str(exc))
            if s.terminal:
                return result_payload(live)
            return question_payload(live)

    @app.get("/sessions/{session_id}/result")
    def get_result(session_id: str) -> dict[str, Any]:
        live = get_live(session_id)
        with live.lock:
            touch_and_expire(live)
            if not live.session.terminal:
                raise HTTPException(409, "session still in progress")
            return result_payload(live)

    @app.get("/", response_class=HTMLResponse)
    def index() -> str:
        return _INDEX_HTML

    app.state.datasets = datasets
    return app


def register_dataset(registry: dict[str, RegisteredDataset], name: str,
                     dataset: Dataset, raw: RawTable | None = None) -> None:
    registry[name] = RegisteredDataset(name=name, dataset=dataset, raw=raw)


_INDEX_HTML = """<!doctype html>
<html><head><meta charset="utf-8"><title>sparsepref</title></head>
<body>
<h1>sparsepref session API</h1>
<p>Endpoints: GET /datasets, POST /sessions, GET /sessions/{id}/question,
POST /sessions/{id}/answer, GET /sessions/{id}/result.</p>
<p>The browser frontend lives in the repository's <code>frontend/</code>
directory; build it and serve its <code>dist/</code> against this API.</p>
</body></html>
"""
