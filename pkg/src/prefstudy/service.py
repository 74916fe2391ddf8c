"""HTTP+JSON protocol over the session store.

Endpoints::

    POST /sessions                     create a session
    GET  /sessions/{id}/next           current pair to grade
    POST /sessions/{id}/judgments      submit one grade
    GET  /sessions/{id}/status         state, progress, results
    POST /sessions/{id}/review         accept or revise
    GET  /export                       judgments + weights files

Errors are ``{"code", "message", "detail"}`` JSON bodies. The browser
questionnaire consumes this protocol exclusively; every number it shows is
computed here.
"""

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .ahp import BIPOLAR_SCALE, SaatyGrade, JudgmentError
from .sessions import (
    ProtocolError,
    SessionStore,
    UnknownSessionError,
    inconsistent_pairs,
    transitivity_violations,
)

SCALE_CELLS = [
    {"position": i, "intensity": intensity, "favored": favored}
    for i, (intensity, favored) in enumerate(BIPOLAR_SCALE)
]


class CreateSessionBody(BaseModel):
    respondent: dict = Field(default_factory=dict)
    seed: int | None = None


class JudgmentBody(BaseModel):
    pair_index: int
    intensity: int
    favored: str


class ReviewBody(BaseModel):
    decision: str
    pairs: list[list[int]] = Field(default_factory=list)


def _error(status: int, code: str, message: str, detail=None):
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def _status_payload(store: SessionStore, session) -> dict:
    payload = {
        "session_id": session.session_id,
        "state": session.state,
        "answered": session.answered,
        "total": session.total_pairs,
    }
    if store.transitivity_hints and session.state in ("in_progress", "revising"):
        payload["transitivity_violations"] = transitivity_violations(
            session.judgments, store.design.n_items
        )
    if session.weights is not None:
        payload["weights"] = {
            label: float(w) for label, w in zip(store.design.labels, session.weights)
        }
        payload["cr"] = session.consistency.cr
        payload["cr_guideline"] = 0.1
        payload["above_guideline"] = not session.consistency.acceptable_at_0_1
        payload["inconsistent_pairs"] = inconsistent_pairs(session)
    return payload


def create_app(store: SessionStore) -> FastAPI:
    app = FastAPI(title="prefstudy elicitation service")
    # the questionnaire page is served from a different origin than the API
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ProtocolError)
    async def protocol_error_handler(request: Request, exc: ProtocolError):
        return _error(409, exc.code, str(exc))

    @app.exception_handler(UnknownSessionError)
    async def unknown_session_handler(request: Request, exc: UnknownSessionError):
        return _error(404, "unknown_session", f"no session {exc.args[0]!r}")

    @app.get("/study")
    def study():
        design = store.design
        return {
            "name": design.name,
            "factors": [{"name": f.name, "levels": list(f.levels)} for f in design.factors],
            "profiles": [
                {
                    "label": p.label,
                    "levels": {f.name: f.levels[ix] for f, ix in zip(design.factors, p.level_indices)},
                    "asset": store.assets.get(p.label),
                }
                for p in design.profiles
            ],
            "scale": SCALE_CELLS,
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        session = store.create_session(respondent=body.respondent, seed=body.seed)
        return {
            "session_id": session.session_id,
            "state": session.state,
            "total_pairs": session.total_pairs,
            "seed": session.seed,
        }

    @app.get("/sessions/{session_id}/next")
    def next_pair(session_id: str):
        session = store.get(session_id)
        pair = session.current_pair()
        if pair is None:
            return {
                "state": session.state,
                "pair": None,
                "progress": {"answered": session.answered, "total": session.total_pairs},
            }
        i, j = pair
        labels = store.design.labels
        index = (
            session.cursor
            if session.state == "in_progress"
            else session.pair_order.index(pair)
        )
        return {
            "state": session.state,
            "pair": {
                "pair_index": index,
                "left": {"label": labels[i], "asset": store.assets.get(labels[i])},
                "right": {"label": labels[j], "asset": store.assets.get(labels[j])},
            },
            "scale": SCALE_CELLS,
            "progress": {"answered": session.answered, "total": session.total_pairs},
        }

    @app.post("/sessions/{session_id}/judgments")
    def submit_judgment(session_id: str, body: JudgmentBody):
        session = store.get(session_id)
        expected = session.current_pair()
        if expected is None:
            raise ProtocolError("wrong_state", f"no pair is awaiting an answer in state {session.state!r}")
        expected_index = (
            session.cursor
            if session.state == "in_progress"
            else session.pair_order.index(expected)
        )
        if body.pair_index != expected_index:
            raise ProtocolError(
                "out_of_order",
                f"expected pair_index {expected_index}, got {body.pair_index}",
            )
        try:
            grade = SaatyGrade(intensity=body.intensity, favored=body.favored)
        except JudgmentError as exc:
            return _error(422, "bad_grade", str(exc))
        store.submit_judgment(session_id, expected, grade)
        return _status_payload(store, session)

    @app.get("/sessions/{session_id}/status")
    def status(session_id: str):
        return _status_payload(store, store.get(session_id))

    @app.post("/sessions/{session_id}/review")
    def review(session_id: str, body: ReviewBody):
        pairs = []
        for entry in body.pairs:
            if len(entry) != 2:
                return _error(422, "bad_pair", f"pair must have two indices, got {entry}")
            pairs.append((int(entry[0]), int(entry[1])))
        session = store.review(session_id, body.decision, pairs)
        return _status_payload(store, session)

    @app.get("/export")
    def export(partial: bool = False):
        judgments_csv, weights_csv, exported, skipped = store.export(partial=partial)
        return {
            "judgments_csv": judgments_csv,
            "weights_csv": weights_csv,
            "sessions": exported,
            "skipped": skipped,
        }

    return app
