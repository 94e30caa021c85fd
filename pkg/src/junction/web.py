"""HTTP/JSON facade over TutorService.

Endpoints:
    POST /sessions                         open a session
    POST /sessions/{id}/events             ingest a telemetry event
    GET  /sessions/{id}/assist/{block}     request an assistance decision
    POST /sessions/{id}/submit/{block}     submit an activity attempt
    GET  /sessions/{id}/objective          current objective and progress
    GET  /content/{block}                  help sections and activity spec
    GET  /content/{block}/howtoplay        instructions for the activity
    POST /admin/train                      synchronous warm-up training
    GET  /admin/report                     pre/post improvement report

Errors come back as JSON {code, message, detail} with a 4xx/5xx status.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import errors as eng
from .activities import write_chart_csv
from .curriculum import ActivityKind, ContentBlock
from .service import AssistanceDecision, SubmitResult, TutorService

_STATUS = {
    eng.UnknownSession: 404,
    eng.UnknownCurriculum: 404,
    eng.UnknownBlockId: 404,
    eng.BlockLocked: 409,
    eng.WrongActivityType: 409,
    eng.StorageFailure: 500,
}


class EventIn(BaseModel):
    type: str
    payload: dict[str, Any] = {}
    ts: int | None = None


class SessionIn(BaseModel):
    curriculum_id: str | None = None


class MixItem(BaseModel):
    archetype: str
    count: int


class TrainIn(BaseModel):
    episodes: int = 2000
    seed: int = 0
    mix: list[MixItem] | None = None


def _decision_json(decision: AssistanceDecision) -> dict[str, Any]:
    return {
        "block": decision.block,
        "action": {
            "id": decision.action.id,
            "kind": decision.action.kind.value,
            "payload": decision.action.payload,
        },
        "delivery": decision.delivery,
        "mandatory_open": decision.mandatory_open,
    }


def _submit_json(result: SubmitResult) -> dict[str, Any]:
    return {
        "kind": result.kind.value,
        "score": result.score,
        "correct": result.correct,
        "diagnostics": [
            {
                "severity": d.severity,
                "line": d.line,
                "column": d.column,
                "message": d.message,
            }
            for d in result.diagnostics
        ],
        "violations": [
            {
                "check": v.check,
                "scenario": v.scenario,
                "tick": v.tick,
                "state": v.state,
                "message": v.message,
            }
            for v in result.violations
        ],
        "trace": [
            {"tick": r.tick, "state": r.state, "ns": r.ns, "ew": r.ew, "elapsed": r.elapsed}
            for r in result.trace
        ],
    }


def _content_json(service: TutorService, block: ContentBlock, session_id: str | None) -> dict[str, Any]:
    activity: dict[str, Any] = {"kind": block.activity.kind.value}
    params = block.activity.params
    if block.activity.kind is ActivityKind.QUIZ:
        activity["items"] = [
            {"id": item["id"], "prompt": item["prompt"], "options": item["options"]}
            for item in params.get("items", [])
        ]
    elif block.activity.kind is ActivityKind.BINARY_MATCH:
        activity.update(
            {k: params.get(k) for k in ("difficulty", "count", "time_limit")}
        )
        if session_id is not None:
            round_ = service.binary_round(session_id, block.id)
            activity["round"] = {
                "binaries": [binary for binary, _ in round_.pairs],
                "options": round_.options(),
                "time_limit": round_.time_limit,
            }
    elif block.activity.kind is ActivityKind.PHASE_ORDER:
        # Sorted, not cycle order: the puzzle is to reconstruct the order.
        activity["phases"] = sorted(params.get("phases", []))
    elif block.activity.kind is ActivityKind.CODE_TASK:
        activity["starter"] = params.get("starter", "")
        if service.rubric is not None:
            activity["rubric"] = {
                "checks": [{"id": c.id, "weight": c.weight} for c in service.rubric.checks],
                "scenarios": [s.name for s in service.rubric.scenarios],
            }
    return {
        "id": block.id,
        "title": block.title,
        "prerequisites": list(block.prerequisites),
        "activity": activity,
        "help_sections": [
            {"id": s.id, "title": s.title, "body": s.body, "media": s.media}
            for s in block.help_sections
        ],
        "assistance": [
            {"id": a.id, "kind": a.kind.value, "payload": a.payload} for a in block.assistance
        ],
    }


def create_app(
    service: TutorService,
    howtoplay: dict[str, str] | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="junction tutor service")
    howtoplay = howtoplay or {}

    @app.exception_handler(eng.EngineError)
    async def engine_error(request: Request, exc: eng.EngineError):
        status = _STATUS.get(type(exc), 400)
        return JSONResponse(
            status_code=status,
            content={"code": type(exc).__name__, "message": str(exc), "detail": None},
        )

    @app.post("/sessions")
    def open_session(body: SessionIn | None = None):
        session = service.open_session(body.curriculum_id if body else None)
        return {
            "session": session.id,
            "curriculum": session.curriculum_id,
            "objective": session.objective,
        }

    @app.post("/sessions/{session_id}/events")
    def ingest(session_id: str, event: EventIn):
        seq = service.ingest(session_id, event.type, event.payload, ts=event.ts)
        objective = service.sessions[session_id].objective
        return {"seq": seq, "objective": objective}

    @app.get("/sessions/{session_id}/assist/{block_id}")
    def assist(session_id: str, block_id: str):
        return _decision_json(service.request_assistance(session_id, block_id))

    @app.post("/sessions/{session_id}/submit/{block_id}")
    def submit(session_id: str, block_id: str, body: dict[str, Any]):
        return _submit_json(service.submit(session_id, block_id, body))

    @app.get("/sessions/{session_id}/objective")
    def objective(session_id: str):
        return service.objective(session_id)

    @app.get("/content/{block_id}")
    def content(block_id: str, session: str | None = None):
        return _content_json(service, service.graph.block(block_id), session)

    @app.get("/content/{block_id}/howtoplay")
    def block_howtoplay(block_id: str):
        block = service.graph.block(block_id)
        kind = block.activity.kind.value
        return {
            "block": block.id,
            "title": block.title,
            "text": howtoplay.get(kind, howtoplay.get("default", "Explore the station and complete the task.")),
        }

    @app.post("/admin/train")
    def admin_train(body: TrainIn):
        mix = [(m.archetype, m.count) for m in body.mix] if body.mix else None
        result = service.pretrain(body.episodes, body.seed, mix)
        return {
            "episodes": body.episodes,
            "seed": body.seed,
            "curve_tail": result.curve[-5:],
            "mean_reward_last_bucket": result.curve[-1][1] if result.curve else None,
        }

    @app.get("/admin/report")
    def admin_report():
        reports = service.report()
        return {
            "groups": [
                {
                    "label": r.label,
                    "n": r.n,
                    "mean_improvement": r.mean_improvement,
                    "regressed": r.regressed,
                    "rows": [{"pre": pre, "post": post, "improvement": imp} for pre, post, imp in r.rows],
                }
                for r in reports
            ],
            "chart_csv": write_chart_csv(reports),
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/app", StaticFiles(directory=str(static_dir), html=True), name="app")

    return app
