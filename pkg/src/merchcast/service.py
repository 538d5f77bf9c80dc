"""HTTP facade over the scoring engine for live expert sessions.

JSON over HTTP under /v1 with bearer-token auth. The admin credential
provisions sessions and closes rounds; each expert receives an opaque token
bound to exactly one (session, expert) pair. Feedback payloads are the
engine's anonymized aggregates and never contain expert identities or
tokens.

Persistence is an append-only JSON-lines event log per session (created,
submitted, closed). State is rebuilt by replaying the log on startup, and a
snapshot of the full session document is written every time a round closes.
"""

from __future__ import annotations

import json
import secrets
import threading
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Response
from pydantic import BaseModel, Field

from .delphi import (
    CATEGORIES,
    Category,
    DelphiSession,
    ScoreSheet,
    open_session,
    session_to_doc,
)
from .errors import (
    DelphiError,
    IncompleteSheetError,
    MissingSubmissionsError,
    RoundAlreadyClosedError,
    RoundClosedError,
    RoundNotClosedError,
    ScoreOutOfRangeError,
    SessionIncompleteError,
    UnknownExpertError,
    UnknownSampleError,
)

API_PREFIX = "/v1"


class SessionCreateRequest(BaseModel):
    experts: list[str] = Field(min_length=2)
    samples: list[int] = Field(min_length=1)
    epsilon: float = 2.0
    max_rounds: int = 10
    movies: Optional[dict[str, dict]] = None  # sample id (as str) -> movie details


class SheetPayload(BaseModel):
    sample_id: int
    scores: dict[str, int]


class SubmitRequest(BaseModel):
    round: int
    sheets: list[SheetPayload]


class _SessionState:
    def __init__(self, session_id: str, engine: DelphiSession,
                 tokens: dict[str, str], movies: dict[int, dict]):
        self.session_id = session_id
        self.engine = engine
        self.tokens = tokens  # token -> expert id
        self.movies = movies
        self.lock = threading.Lock()


class ScoringService:
    """In-memory session registry backed by per-session event logs."""

    def __init__(self, store_dir: str | Path, admin_token: str):
        self.store_dir = Path(store_dir)
        self.store_dir.mkdir(parents=True, exist_ok=True)
        self.admin_token = admin_token
        self.sessions: dict[str, _SessionState] = {}
        self._replay_all()

    # -- event log ------------------------------------------------------------

    def _log_path(self, session_id: str) -> Path:
        return self.store_dir / f"{session_id}.events.jsonl"

    def _append_event(self, session_id: str, event: dict) -> None:
        try:
            with open(self._log_path(session_id), "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")
        except OSError as err:
            raise HTTPException(
                status_code=503,
                detail=f"event store unavailable ({err}); retry after freeing space",
            ) from err

    def _snapshot(self, state: _SessionState) -> None:
        path = self.store_dir / f"{state.session_id}.snapshot.json"
        doc = session_to_doc(state.engine)
        path.write_text(json.dumps(doc, sort_keys=True, indent=2), encoding="utf-8")

    def _replay_all(self) -> None:
        for log in sorted(self.store_dir.glob("*.events.jsonl")):
            session_id = log.name[: -len(".events.jsonl")]
            self._replay(session_id, log)

    def _replay(self, session_id: str, log: Path) -> None:
        state: _SessionState | None = None
        with open(log, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                event = json.loads(line)
                kind = event["type"]
                if kind == "session_created":
                    engine = open_session(
                        event["experts"], event["samples"],
                        epsilon=event["epsilon"], max_rounds=event["max_rounds"],
                    )
                    state = _SessionState(
                        session_id, engine,
                        tokens=dict(event["tokens"]),
                        movies={int(k): v for k, v in (event.get("movies") or {}).items()},
                    )
                elif kind == "scores_submitted":
                    sheets = [
                        ScoreSheet(
                            expert_id=event["expert_id"], round_index=event["round"],
                            sample_id=s["sample_id"],
                            scores={Category(c): v for c, v in s["scores"].items()},
                        )
                        for s in event["sheets"]
                    ]
                    state.engine.submit_scores(event["expert_id"], event["round"], sheets)
                elif kind == "round_closed":
                    state.engine.close_round(event["round"])
        if state is not None:
            self.sessions[session_id] = state

    # -- operations -------------------------------------------------------------

    def create_session(self, req: SessionCreateRequest) -> dict:
        engine = open_session(req.experts, req.samples,
                              epsilon=req.epsilon, max_rounds=req.max_rounds)
        session_id = secrets.token_hex(8)
        tokens = {secrets.token_urlsafe(16): expert for expert in engine.experts}
        movies = {int(k): v for k, v in (req.movies or {}).items()}
        state = _SessionState(session_id, engine, tokens, movies)
        self.sessions[session_id] = state
        self._append_event(session_id, {
            "type": "session_created",
            "experts": list(engine.experts),
            "samples": list(engine.samples),
            "epsilon": engine.epsilon,
            "max_rounds": engine.max_rounds,
            "tokens": tokens,
            "movies": {str(k): v for k, v in movies.items()},
        })
        return {
            "session_id": session_id,
            "round": engine.current_round,
            "expert_tokens": {expert: token for token, expert in tokens.items()},
        }

    def get_state(self, session_id: str) -> _SessionState:
        state = self.sessions.get(session_id)
        if state is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return state


def _error_response(err: DelphiError) -> HTTPException:
    if isinstance(err, (ScoreOutOfRangeError, IncompleteSheetError, UnknownSampleError)):
        return HTTPException(status_code=422, detail=str(err))
    if isinstance(err, (RoundClosedError, RoundNotClosedError, RoundAlreadyClosedError,
                        MissingSubmissionsError, SessionIncompleteError)):
        return HTTPException(status_code=409, detail=str(err))
    if isinstance(err, UnknownExpertError):
        return HTTPException(status_code=401, detail=str(err))
    return HTTPException(status_code=400, detail=str(err))


def create_app(store_dir: str | Path, admin_token: str = "change-me-admin") -> FastAPI:
    service = ScoringService(store_dir, admin_token)
    app = FastAPI(
        title="merchcast delphi scoring service",
        version="1.0.0",
        description="Round-based anonymous expert scoring sessions for movie "
                    "merchandising value labeling.",
    )
    app.state.service = service

    def bearer(authorization: str | None) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        return authorization[len("Bearer "):]

    def require_admin(authorization: str | None = Header(default=None)) -> None:
        if bearer(authorization) != service.admin_token:
            raise HTTPException(status_code=401, detail="bad admin credential")

    def require_expert(session_id: str, authorization: str | None) -> tuple[_SessionState, str]:
        state = service.get_state(session_id)
        token = bearer(authorization)
        expert = state.tokens.get(token)
        if expert is None:
            raise HTTPException(status_code=401, detail="bad expert token")
        return state, expert

    # -- admin endpoints --------------------------------------------------------

    @app.post(f"{API_PREFIX}/sessions", status_code=201,
              dependencies=[Depends(require_admin)])
    def create_session(req: SessionCreateRequest):
        try:
            return service.create_session(req)
        except DelphiError as err:
            raise HTTPException(status_code=422, detail=str(err)) from err

    @app.get(API_PREFIX + "/sessions/{session_id}/status",
             dependencies=[Depends(require_admin)])
    def session_status(session_id: str):
        state = service.get_state(session_id)
        engine = state.engine
        return {
            "session_id": session_id,
            "round": engine.current_round,
            "complete": engine.complete,
            "open_samples": list(engine.open_samples),
            "labeled": len(engine.labels),
            "total_samples": len(engine.samples),
            "pending_experts": list(engine.pending_experts()),
            "closed_rounds": sorted(engine.results),
        }

    @app.get(API_PREFIX + "/sessions/{session_id}/rounds",
             dependencies=[Depends(require_admin)])
    def round_history(session_id: str):
        state = service.get_state(session_id)
        return {
            "rounds": [
                {
                    "round": rnd,
                    "results": [
                        {"sample_id": r.sample_id, "mean": r.mean, "sigma": r.sigma,
                         "converged": r.converged, "n_scores": r.n_scores}
                        for r in results
                    ],
                }
                for rnd, results in sorted(state.engine.results.items())
            ],
        }

    @app.post(API_PREFIX + "/sessions/{session_id}/rounds/{round_index}/close",
              dependencies=[Depends(require_admin)])
    def close_round(session_id: str, round_index: int):
        state = service.get_state(session_id)
        with state.lock:
            try:
                results = state.engine.close_round(round_index)
            except RoundAlreadyClosedError:
                results = state.engine.results[round_index]  # idempotent close
            except DelphiError as err:
                raise _error_response(err) from err
            else:
                service._append_event(session_id, {"type": "round_closed",
                                                   "round": round_index})
                service._snapshot(state)
        return {
            "round": round_index,
            "results": [
                {"sample_id": r.sample_id, "mean": r.mean, "sigma": r.sigma,
                 "converged": r.converged, "n_scores": r.n_scores}
                for r in results
            ],
            "open_samples": list(state.engine.open_samples),
            "complete": state.engine.complete,
        }

    @app.get(API_PREFIX + "/sessions/{session_id}/labels",
             dependencies=[Depends(require_admin)])
    def export_labels(session_id: str):
        state = service.get_state(session_id)
        try:
            rows = state.engine.export_labels()
        except DelphiError as err:
            raise _error_response(err) from err
        body = "sample_id,label,forced\n" + "".join(
            f"{r.sample_id},{r.label},{str(r.forced).lower()}\n" for r in rows
        )
        return Response(content=body, media_type="text/csv")

    # -- expert endpoints ---------------------------------------------------------

    @app.get(API_PREFIX + "/sessions/{session_id}/open")
    def open_samples(session_id: str, authorization: str | None = Header(default=None)):
        state, expert = require_expert(session_id, authorization)
        engine = state.engine
        submitted = engine._submissions.get(engine.current_round, {}).get(expert, {})
        return {
            "round": engine.current_round,
            "complete": engine.complete,
            "categories": [c.value for c in CATEGORIES],
            "samples": [
                {
                    "sample_id": sid,
                    "movie": state.movies.get(sid, {}),
                    "submitted": sid in submitted,
                }
                for sid in engine.open_samples
            ],
            "feedback_rounds": sorted(engine.results),
        }

    @app.put(API_PREFIX + "/sessions/{session_id}/scores")
    def submit_scores(session_id: str, req: SubmitRequest,
                      authorization: str | None = Header(default=None)):
        state, expert = require_expert(session_id, authorization)
        try:
            sheets = [
                ScoreSheet(
                    expert_id=expert, round_index=req.round, sample_id=p.sample_id,
                    scores={Category(c): v for c, v in p.scores.items()},
                )
                for p in req.sheets
            ]
        except ValueError as err:  # unknown category name
            raise HTTPException(status_code=422, detail=str(err)) from err
        except DelphiError as err:
            raise _error_response(err) from err
        with state.lock:
            try:
                stored = state.engine.submit_scores(expert, req.round, sheets)
            except DelphiError as err:
                raise _error_response(err) from err
            service._append_event(session_id, {
                "type": "scores_submitted",
                "expert_id": expert,
                "round": req.round,
                "sheets": [
                    {"sample_id": s.sample_id,
                     "scores": {c.value: s.scores[c] for c in CATEGORIES}}
                    for s in sheets
                ],
            })
        return {"accepted": stored, "round": req.round,
                "totals": {str(s.sample_id): s.total for s in sheets}}

    @app.get(API_PREFIX + "/sessions/{session_id}/feedback/{round_index}")
    def feedback(session_id: str, round_index: int,
                 authorization: str | None = Header(default=None)):
        state, expert = require_expert(session_id, authorization)
        try:
            return state.engine.feedback(round_index, expert)
        except DelphiError as err:
            raise _error_response(err) from err

    return app
