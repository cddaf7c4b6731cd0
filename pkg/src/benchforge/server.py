"""HTTP API over the annotation workspace.

Thin delegation layer: each endpoint maps 1:1 onto a workflow or evaluation
operation, so any state reachable through the CLI is reachable through the
API (they share the same command layer). Mutating endpoints require a bearer
token (env BENCHFORGE_TOKEN); annotator identity travels in request bodies
for provenance only.
"""

from __future__ import annotations

import os

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from benchforge.errors import (
    BackendError,
    BenchforgeError,
    DuplicateName,
    InvalidTransition,
    LeaseMismatch,
    NoAcceptedItems,
    NothingAccepted,
    QueueEmpty,
    UnknownCandidate,
    UnknownItem,
    UnknownProject,
)
from benchforge.evaluation import ExecutionBackend, evaluate_project
from benchforge.workflow import ProjectConfig, Workspace
from benchforge.workflow.models import AnnotationItem

ENV_TOKEN = "BENCHFORGE_TOKEN"

_STATUS_BY_ERROR = {
    UnknownProject: 404,
    UnknownItem: 404,
    UnknownCandidate: 404,
    QueueEmpty: 404,
    LeaseMismatch: 409,
    InvalidTransition: 409,
    DuplicateName: 409,
    NothingAccepted: 409,
    NoAcceptedItems: 409,
    BackendError: 502,
}


def _status_for(exc: BenchforgeError) -> int:
    for cls, status in _STATUS_BY_ERROR.items():
        if isinstance(exc, cls):
            return status
    return 400


class CreateProjectBody(BaseModel):
    name: str
    dialect: str = "generic"
    config: dict | None = None


class IngestQueriesBody(BaseModel):
    data: str
    source_tag: str = ""


class IngestSchemaBody(BaseModel):
    data: str
    format: str | None = None


class NextBody(BaseModel):
    annotator_id: str


class FeedbackBody(BaseModel):
    annotator_id: str
    kind: str
    payload: dict = {}


class AcceptBody(BaseModel):
    annotator_id: str
    candidate_id: str
    final_text: str | None = None


class EvaluateBody(BaseModel):
    db_dir: str


def _item_view(item: AnnotationItem) -> dict:
    doc = item.to_json()
    doc["is_nested"] = item.is_nested
    return doc


def create_app(workspace: Workspace | None = None, root: str | None = None,
               token: str | None = None,
               cors_origins: list[str] | None = None) -> FastAPI:
    ws = workspace or Workspace(root)
    expected_token = token if token is not None else os.environ.get(ENV_TOKEN, "")

    app = FastAPI(title="benchforge", docs_url=None, redoc_url=None)
    app.state.workspace = ws
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(BenchforgeError)
    async def _domain_error(request: Request, exc: BenchforgeError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"code": exc.code, "message": str(exc)},
        )

    def require_token(authorization: str = Header(default="")) -> None:
        if not expected_token:
            return
        if authorization != f"Bearer {expected_token}":
            raise _Unauthorized()

    class _Unauthorized(Exception):
        pass

    @app.exception_handler(_Unauthorized)
    async def _unauthorized(request: Request, exc: _Unauthorized):
        return JSONResponse(
            status_code=401,
            content={"code": "unauthorized", "message": "missing or bad token"},
        )

    # --- read endpoints ----------------------------------------------------

    @app.get("/api/health")
    def health():
        return {"status": "ok", "projects": len(ws.list_projects())}

    @app.get("/api/projects")
    def list_projects():
        out = []
        for project in ws.list_projects():
            doc = project.to_json()
            doc["stats"] = ws.get(project.project_id).stats()
            out.append(doc)
        return out

    @app.get("/api/projects/{project_id}")
    def get_project(project_id: str):
        engine = ws.get(project_id)
        doc = engine.project.to_json()
        doc["stats"] = engine.stats()
        doc["schema"] = engine.catalog.to_json() if engine.catalog else None
        return doc

    @app.get("/api/projects/{project_id}/items")
    def list_items(project_id: str, state: str | None = Query(default=None)):
        engine = ws.get(project_id)
        return [_item_view(i) for i in engine.list_items(state)]

    @app.get("/api/items/{item_id}")
    def get_item(item_id: str):
        _, item = ws.find_item(item_id)
        return _item_view(item)

    # --- mutating endpoints --------------------------------------------------

    @app.post("/api/projects", dependencies=[Depends(require_token)])
    def create_project(body: CreateProjectBody):
        config = ProjectConfig.from_json(body.config) if body.config else None
        engine = ws.create_project(body.name, body.dialect, config)
        return engine.project.to_json()

    @app.post("/api/projects/{project_id}/schema",
              dependencies=[Depends(require_token)])
    def ingest_schema(project_id: str, body: IngestSchemaBody):
        engine = ws.get(project_id)
        catalog = engine.ingest_schema(body.data, format_hint=body.format)
        return catalog.to_json()

    @app.post("/api/projects/{project_id}/queries",
              dependencies=[Depends(require_token)])
    def ingest_queries(project_id: str, body: IngestQueriesBody):
        engine = ws.get(project_id)
        return engine.ingest_queries(body.data, body.source_tag).to_json()

    @app.post("/api/projects/{project_id}/next",
              dependencies=[Depends(require_token)])
    def annotate_next(project_id: str, body: NextBody):
        engine = ws.get(project_id)
        item = engine.annotate_next(body.annotator_id)
        return _item_view(item)

    @app.post("/api/items/{item_id}/feedback",
              dependencies=[Depends(require_token)])
    def submit_feedback(item_id: str, body: FeedbackBody):
        engine, _ = ws.find_item(item_id)
        if body.kind == "reopen":
            item = engine.reopen(item_id, body.annotator_id)
        else:
            item = engine.submit_feedback(item_id, body.annotator_id,
                                          body.kind, body.payload)
        return _item_view(item)

    @app.post("/api/items/{item_id}/accept",
              dependencies=[Depends(require_token)])
    def accept(item_id: str, body: AcceptBody):
        engine, _ = ws.find_item(item_id)
        item = engine.accept(item_id, body.annotator_id, body.candidate_id,
                             body.final_text)
        return _item_view(item)

    @app.post("/api/projects/{project_id}/export",
              dependencies=[Depends(require_token)])
    def export(project_id: str):
        engine = ws.get(project_id)
        records = engine.export_records()
        return {"count": len(records), "records": records}

    @app.post("/api/projects/{project_id}/evaluate",
              dependencies=[Depends(require_token)])
    def evaluate(project_id: str, body: EvaluateBody):
        engine = ws.get(project_id)
        db = ExecutionBackend.from_fixture_dir(body.db_dir)
        return evaluate_project(engine, db).to_json()

    return app


def serve(root: str, port: int = 8765, host: str = "127.0.0.1",
          token: str | None = None) -> None:
    """Run the API with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(root=root, token=token), host=host, port=port)
