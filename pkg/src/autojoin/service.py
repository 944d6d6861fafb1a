"""HTTP facade over ingestion, planning, and query execution.

Every error response has the shape ``{"code", "message", "detail"}`` where
``code`` is the raising exception's class name. Plan responses are rendered
through the same canonical serializer as the CLI's ``--json`` output, so
the two are byte-identical.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import (
    AutoJoinError,
    EmptyTargets,
    NoJoinPath,
    PlanTimeout,
)
from .graph import LinkSelection, build_graph
from .jsonio import canonical_json
from .planner import TargetSet, plan
from .runtime import Workspace
from .sqlgen import (
    Filter,
    JoinType,
    QueryTemplate,
    ResolutionPolicy,
    output_columns,
    resolve,
)

_STATUS_BY_CODE = {
    "NoJoinPath": 422,
    "PlanTimeout": 504,
    "ExecutorRequired": 500,
    "BackendUnavailable": 500,
}
_DEFAULT_ERROR_STATUS = 400


class _NotReady(AutoJoinError):
    """The service has no ingested data or catalog to answer with."""

    @property
    def code(self) -> str:
        return "NotReady"


class _BadRequest(AutoJoinError):
    """A request field has a value outside the supported vocabulary."""

    @property
    def code(self) -> str:
        return "BadRequest"


_STATUS_BY_CODE["NotReady"] = 503
_STATUS_BY_CODE["BadRequest"] = 400


class PlanRequest(BaseModel):
    targets: list[str]
    max_depth: int | None = None


class FilterSpec(BaseModel):
    column: str
    op: str = "="
    value: Any = None


class QueryRequest(BaseModel):
    select: list[str] = Field(default_factory=list)
    filters: list[FilterSpec] = Field(default_factory=list)
    targets: list[str] | None = None
    policy: str = "all"
    join_type: str = "inner"
    max_depth: int | None = None


def _error_response(code: str, message: str, detail: Any = None) -> JSONResponse:
    status = _STATUS_BY_CODE.get(code, _DEFAULT_ERROR_STATUS)
    body: dict[str, Any] = {"code": code, "message": message}
    if detail is not None:
        body["detail"] = detail
    return JSONResponse(status_code=status, content=body)


def _canonical_response(payload: Any) -> Response:
    return Response(content=canonical_json(payload), media_type="application/json")


def create_app(
    workspace: Workspace,
    *,
    dev_cors: bool = False,
    plan_timeout: float = 10.0,
    ui_dir: "str | Path | None" = None,
) -> FastAPI:
    """Build the API application around a loaded workspace."""
    app = FastAPI(title="autojoin", docs_url=None, redoc_url=None)

    if dev_cors:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(AutoJoinError)
    async def handle_autojoin_error(request: Request, exc: AutoJoinError) -> JSONResponse:
        detail = None
        if isinstance(exc, PlanTimeout):
            detail = exc.diagnostics
        return _error_response(exc.code, str(exc), detail)

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(
        request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return _error_response("ValidationError", "invalid request body", exc.errors())

    def require_catalog():
        if workspace.catalog is None:
            raise _NotReady("no catalog loaded; ingest data and define links first")
        return workspace.catalog

    def require_graph():
        if workspace.graph is None:
            raise _NotReady("no join graph available; load metadata first")
        return workspace.graph

    def require_dataset():
        if workspace.dataset is None:
            raise _NotReady("no dataset ingested")
        return workspace.dataset

    @app.get("/api/tables")
    def get_tables() -> Response:
        if workspace.catalog is None and workspace.dataset is None:
            raise _NotReady("no data has been ingested")
        tables = []
        if workspace.catalog is not None:
            for schema in workspace.catalog.tables:
                row_count = None
                if workspace.dataset is not None and schema.name in workspace.dataset.tables:
                    row_count = workspace.dataset.row_count(schema.name)
                tables.append(
                    {
                        "name": schema.name,
                        "alias": workspace.alias_of(schema.name),
                        "row_count": row_count,
                        "columns": [
                            {
                                "name": col.name,
                                "class": col.column_class.value if col.column_class else None,
                            }
                            for col in schema.columns
                        ],
                    }
                )
        else:
            for info in workspace.dataset.tables.values():
                tables.append(
                    {
                        "name": info.name,
                        "alias": workspace.alias_of(info.name),
                        "row_count": info.row_count,
                        "columns": [{"name": col, "class": None} for col in info.columns],
                    }
                )
        return _canonical_response({"tables": tables})

    @app.get("/api/graph")
    def get_graph(links: "str | None" = None) -> Response:
        catalog = require_catalog()
        if links is not None:
            ids = [part for part in links.split(",") if part]
            selection = LinkSelection.only(catalog, ids)
            graph = build_graph(catalog, selection)
        else:
            graph = require_graph()
        return _canonical_response(graph.to_json_dict())

    @app.post("/api/plan")
    def post_plan(request: PlanRequest) -> Response:
        graph = require_graph()
        targets = [workspace.resolve_table(name) for name in request.targets]
        result = plan(
            graph,
            targets,
            max_depth=request.max_depth or workspace.max_depth,
            cache=workspace.cache,
            combination_cap=workspace.combination_cap,
            deadline=time.monotonic() + plan_timeout,
        )
        return _canonical_response(result.to_json_dict())

    @app.post("/api/query")
    def post_query(request: QueryRequest) -> Response:
        graph = require_graph()
        dataset = require_dataset()
        select = tuple(workspace.resolve_column(text) for text in request.select)
        filters = tuple(
            Filter(workspace.resolve_column(spec.column), spec.op, spec.value)
            for spec in request.filters
        )
        if request.targets is not None:
            target_tables = [workspace.resolve_table(name) for name in request.targets]
        else:
            target_tables = [ref.table for ref in select] + [flt.column.table for flt in filters]
        targets = TargetSet.coerce(target_tables)
        if not targets.tables:
            raise EmptyTargets("request selects no tables")
        try:
            policy = ResolutionPolicy(request.policy.replace("-", "_"))
        except ValueError:
            raise _BadRequest(f"unknown policy {request.policy!r}") from None
        try:
            join_type = JoinType(request.join_type)
        except ValueError:
            raise _BadRequest(f"unknown join type {request.join_type!r}") from None

        result = plan(
            graph,
            targets,
            max_depth=request.max_depth or workspace.max_depth,
            cache=workspace.cache,
            combination_cap=workspace.combination_cap,
            deadline=time.monotonic() + plan_timeout,
        )
        if not result.sequences:
            raise NoJoinPath(f"no join path covers {', '.join(targets.tables)}")

        template = QueryTemplate(select=select, filters=filters, join_type=join_type)
        queries = resolve(
            result.sequences,
            policy,
            template,
            executor=lambda sql, params: dataset.execute(sql, params).rows,
        )
        results = []
        for query in queries:
            executed = dataset.execute(query.sql, query.params)
            columns = output_columns(select) if select else executed.columns
            results.append(
                {
                    "sql": query.sql,
                    "params": list(query.params),
                    "sequences": [sequence.to_json_dict() for sequence in query.sequences],
                    "columns": list(columns),
                    "rows": [list(row) for row in executed.rows],
                    "row_count": len(executed.rows),
                    "chosen_row_count": query.chosen_row_count,
                }
            )
        return _canonical_response(
            {
                "policy": policy.value,
                "join_type": join_type.value,
                "plan": result.to_json_dict(),
                "results": results,
            }
        )

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
