"""JSON-over-HTTP service exposing classify / explain / interpolant.

Stateless per request: the client sends the full instance and control spec
every time. Domain errors map to 400 with {"error": {code, message}};
malformed bodies map to 422 with the same shape. Responses are serialized
with the same writer the CLI uses, so payloads are byte-identical.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from .cfe import ControlSpec, classify, counterfactuals, craig_interpolant
from .engine.justify import tree_to_dict
from .errors import RecourseError
from .schema import Instance
from .workspace import Workspace


def dump_payload(payload: dict) -> bytes:
    """Canonical JSON bytes shared by the CLI --json path and the service."""
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


class _Malformed(Exception):
    def __init__(self, message: str):
        self.message = message


def _json_response(payload: dict, status: int = 200) -> Response:
    return Response(
        content=dump_payload(payload), media_type="application/json", status_code=status
    )


def _error(status: int, code: str, message: str) -> Response:
    return _json_response({"error": {"code": code, "message": message}}, status)


async def _body(request: Request) -> dict:
    try:
        data = json.loads(await request.body() or b"null")
    except json.JSONDecodeError as exc:
        raise _Malformed(f"invalid JSON body: {exc}") from exc
    if not isinstance(data, dict):
        raise _Malformed("request body must be a JSON object")
    return data


def _instance_from(ws: Workspace, data: dict) -> Instance:
    raw = data.get("instance")
    if not isinstance(raw, dict):
        raise _Malformed("missing or malformed 'instance' object")
    return Instance.from_raw(ws.schema, raw)


def _controls_from(data: dict) -> ControlSpec:
    raw = data.get("controls") or {}
    if not isinstance(raw, dict):
        raise _Malformed("'controls' must be an object of feature -> policy")
    return ControlSpec.of({str(k): str(v) for k, v in raw.items()})


def classify_payload(ws: Workspace, instance: Instance) -> dict:
    label, proof = classify(ws.schema, ws.program, ws.decision, instance)
    return {"label": label, "justification": tree_to_dict(proof)}


def explain_payload(
    ws: Workspace,
    instance: Instance,
    controls: ControlSpec,
    cost: int | None,
    limit: int | None,
) -> dict:
    results = []
    stream = counterfactuals(
        ws.schema, ws.program, ws.causal, ws.decision, instance, controls, cost_bound=cost
    )
    for result in stream:
        results.append(result.to_payload(ws.schema))
        if limit is not None and len(results) >= limit:
            break
    return {"results": results}


def interpolant_payload(ws: Workspace, instance: Instance, controls: ControlSpec) -> dict:
    outcome = craig_interpolant(
        ws.schema, ws.program, ws.causal, ws.decision, instance, controls
    )
    return outcome.to_payload(ws.schema)


def create_app(ws: Workspace, max_concurrency: int | None = None) -> FastAPI:
    app = FastAPI(title="recourse", docs_url=None, redoc_url=None)
    gate = threading.Semaphore(max_concurrency or os.cpu_count() or 4)

    @app.exception_handler(RecourseError)
    async def _domain_error(_request, exc: RecourseError):
        return _error(400, exc.code, str(exc))

    @app.exception_handler(_Malformed)
    async def _malformed(_request, exc: _Malformed):
        return _error(422, "malformed", exc.message)

    @app.get("/api/health")
    def health():
        return _json_response({"ok": True})

    @app.get("/api/schema")
    def schema():
        return _json_response(ws.schema.to_dict())

    @app.post("/api/classify")
    async def classify_endpoint(request: Request):
        data = await _body(request)
        instance = _instance_from(ws, data)
        with gate:
            return _json_response(classify_payload(ws, instance))

    @app.post("/api/explain")
    async def explain_endpoint(request: Request):
        data = await _body(request)
        instance = _instance_from(ws, data)
        controls = _controls_from(data)
        cost = data.get("cost")
        limit = data.get("limit")
        if cost is not None and not isinstance(cost, int):
            raise _Malformed("'cost' must be an integer")
        if limit is None:
            limit = 64
        if not isinstance(limit, int) or limit < 1:
            raise _Malformed("'limit' must be a positive integer")
        with gate:
            return _json_response(explain_payload(ws, instance, controls, cost, limit))

    @app.post("/api/interpolant")
    async def interpolant_endpoint(request: Request):
        data = await _body(request)
        instance = _instance_from(ws, data)
        controls = _controls_from(data)
        with gate:
            return _json_response(interpolant_payload(ws, instance, controls))

    ui_dir = _ui_dist_dir()
    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app


def _ui_dist_dir() -> Path | None:
    env = os.environ.get("RECOURSE_UI_DIR")
    candidates = [Path(env)] if env else []
    here = Path(__file__).resolve()
    for parent in (here.parent.parent.parent, Path.cwd()):
        candidates.append(parent / "frontend" / "dist")
    for candidate in candidates:
        if candidate.is_dir() and (candidate / "index.html").exists():
            return candidate
    return None


def serve(ws: Workspace, port: int = 8000, host: str = "127.0.0.1") -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(ws), host=host, port=port, log_level="warning")
