"""HTTP JSON API over the ReadingService.

Endpoints (all responses carry schema_version):

    POST   /papers                        ingest a DocumentBundle
    GET    /papers/{id}/view?window=W     augmented view + overview
    GET    /papers/{id}/markers/{mid}/card
    POST   /events                        append an activity event
    GET    /history?window=W
    GET    /library
    DELETE /library/{id}
    GET    /settings
    PUT    /settings
    POST   /eval/strategies
    GET    /stats/usage

Error bodies are {"code", "message", "schema_version"}; code is one of
not_found | invalid_input | conflict | internal, each mapped to exactly one
HTTP status.
"""

import os
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from citelens import SCHEMA_VERSION
from citelens.errors import (
    CiteLensError,
    InvalidBundle,
    InvalidEvent,
    InvalidMetadata,
    NotInLibrary,
    UnknownMarker,
    UnknownPaper,
    UnparsedDocument,
    UnresolvedCitation,
)
from citelens.citeparse import make_bundle
from citelens.service import ReadingService

DEFAULT_PORT = 8080
ENV_PORT = "CITELENS_PORT"

_STATUS_BY_CODE = {
    "not_found": 404,
    "invalid_input": 400,
    "conflict": 409,
    "internal": 500,
}


def _error(code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=_STATUS_BY_CODE[code],
        content={"code": code, "message": message, "schema_version": SCHEMA_VERSION},
    )


def create_app(service: ReadingService) -> FastAPI:
    app = FastAPI(title="citelens", version=SCHEMA_VERSION)
    app.state.service = service
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(RequestValidationError)
    async def _on_validation(request: Request, exc: RequestValidationError):
        return _error("invalid_input", str(exc))

    @app.exception_handler(CiteLensError)
    async def _on_citelens_error(request: Request, exc: CiteLensError):
        if isinstance(exc, (UnknownPaper, UnknownMarker, NotInLibrary, UnparsedDocument)):
            return _error("not_found", str(exc))
        if isinstance(exc, (InvalidEvent, InvalidBundle, InvalidMetadata)):
            return _error("invalid_input", str(exc))
        return _error("internal", str(exc))

    @app.post("/papers")
    def ingest(body: dict):
        bundle = make_bundle(
            title=str(body.get("title", "")),
            sections=body.get("sections", []),
            references_block=str(body.get("references_block", "")),
            style_hint=body.get("style_hint", "auto"),
        )
        result = service.ingest_bundle(bundle)
        return {
            "schema_version": SCHEMA_VERSION,
            "paper_id": result.paper_id,
            "parse_report": result.report,
            "resolved_entries": result.resolved_entries,
            "unresolved_entries": result.unresolved_entries,
        }

    @app.get("/papers/{paper_id}/view")
    def view(paper_id: str, window: Optional[int] = None):
        return service.augmented_view(paper_id, window=window)

    @app.get("/papers/{paper_id}/markers/{marker_id}/card")
    def card(paper_id: str, marker_id: str, cited: Optional[str] = None):
        try:
            built = service.paper_card(paper_id, marker_id, cited_paper_id=cited)
        except UnresolvedCitation as e:
            # degraded card: raw reference text only, still a 200
            return {
                "schema_version": SCHEMA_VERSION,
                "degraded": True,
                "raw_text": e.raw_text,
                "card": None,
            }
        return {"schema_version": SCHEMA_VERSION, "degraded": False, "card": built.to_dict()}

    @app.post("/events")
    def record_event(body: dict):
        kind = body.get("kind", "")
        seq = service.record_event(
            kind,
            paper_id=body.get("paper_id", ""),
            payload=body.get("payload"),
            ts=body.get("ts"),
        )
        return {"schema_version": SCHEMA_VERSION, "seq": seq}

    @app.get("/history")
    def history(window: Optional[int] = None):
        return {"schema_version": SCHEMA_VERSION, "history": service.history(window)}

    @app.get("/library")
    def library():
        return {"schema_version": SCHEMA_VERSION, "library": service.library()}

    @app.delete("/library/{paper_id}")
    def unsave(paper_id: str):
        seq = service.unsave_paper(paper_id)
        return {"schema_version": SCHEMA_VERSION, "seq": seq}

    @app.get("/settings")
    def get_settings():
        return {"schema_version": SCHEMA_VERSION, **service.settings()}

    @app.put("/settings")
    def put_settings(body: dict):
        updated = service.update_settings(
            window_size=body.get("window_size"), type_toggles=body.get("type_toggles")
        )
        return {"schema_version": SCHEMA_VERSION, **updated}

    @app.post("/eval/strategies")
    def eval_strategies(body: dict):
        report = service.strategy_report(
            body.get("doc_id", ""),
            list(body.get("peer_ids", [])),
            k=int(body.get("k", 5)),
            seed=int(body.get("seed", 0)),
        )
        return {"schema_version": SCHEMA_VERSION, "report": report.to_dict()}

    @app.get("/stats/usage")
    def stats_usage():
        return {"schema_version": SCHEMA_VERSION, **service.usage_stats()}

    static_dir = os.environ.get("CITELENS_STATIC_DIR")
    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def run(service: ReadingService, port: Optional[int] = None, host: str = "127.0.0.1"):
    import uvicorn

    port = port or int(os.environ.get(ENV_PORT, DEFAULT_PORT))
    uvicorn.run(create_app(service), host=host, port=port, log_level="warning")
