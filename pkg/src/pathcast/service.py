"""HTTP face of the pipeline: scenario CRUD plus projection/simulation runs.

Endpoints (JSON bodies throughout):

    POST   /scenarios                 create
    GET    /scenarios                 list
    GET    /scenarios/{id}            read
    PUT    /scenarios/{id}            update (optimistic, needs expected_version)
    DELETE /scenarios/{id}            delete
    POST   /scenarios/{id}/project    run a projection, optional overrides
    POST   /scenarios/{id}/simulate   run the Monte Carlo engine
    GET    /scenarios/{id}/graph      view=refined|aggregate

Every error body has the shape {"code", "message", "details": [...]}.
Runs are read-only; only the CRUD verbs touch the store.
"""

from __future__ import annotations

import json
import os
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .dsl import CurriculumSyntaxError, parse_curriculum
from .markov import AssignmentError, OutcomeKey, ProbabilityAssignment, apply_overrides
from .pathspace import (
    StateGraph,
    aggregate_graph,
    aggregate_to_json,
    build_state_graph,
    graph_to_json,
)
from .pipeline import run_projection, run_simulation
from .simulate import SimulationConfig
from .store import ScenarioNotFound, ScenarioStore, VersionConflict

__all__ = ["create_app", "DEFAULT_STORE_ENV", "DEFAULT_PORT_ENV"]

DEFAULT_STORE_ENV = "PATHCAST_STORE"
DEFAULT_PORT_ENV = "PATHCAST_PORT"


class AssignmentEntry(BaseModel):
    from_state_id: str
    outcome: str
    target_selection: list[str] = Field(default_factory=list)
    probability: float


class ScenarioPayload(BaseModel):
    name: str
    curriculum_source: str
    assignment: list[AssignmentEntry]
    schedule: dict[int, float]
    horizon: int = Field(ge=1)


class ScenarioUpdate(ScenarioPayload):
    expected_version: int


class Overrides(BaseModel):
    assignment: list[AssignmentEntry] = Field(default_factory=list)
    schedule: dict[int, float] | None = None
    horizon: int | None = Field(default=None, ge=1)
    renormalize: bool = True


class SimulationRequest(BaseModel):
    replicas: int
    seed: int = 0
    horizon: int | None = Field(default=None, ge=1)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: list | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.details = details or []


def _error_response(status: int, code: str, message: str, details: list) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "details": details},
    )


def _entries_to_rows(
    entries: list[AssignmentEntry], g: StateGraph
) -> dict[int, dict[OutcomeKey, float]]:
    rows: dict[int, dict[OutcomeKey, float]] = {}
    for e in entries:
        try:
            state = g.index_of(e.from_state_id)
        except KeyError:
            raise ApiError(
                422,
                "unknown-state",
                f"no state {e.from_state_id!r} in this curriculum's graph",
            ) from None
        key: OutcomeKey = (e.outcome, tuple(sorted(e.target_selection)))
        rows.setdefault(state, {})[key] = e.probability
    return rows


def _validate_scenario(payload: ScenarioPayload) -> None:
    """Full validation: parse + graph + assignment support.  Raises ApiError."""
    try:
        curriculum = parse_curriculum(payload.curriculum_source)
    except CurriculumSyntaxError as exc:
        raise ApiError(
            422,
            "invalid-curriculum",
            "curriculum source does not parse or validate",
            [{"code": e.code, "message": e.message, "line": e.span.line} for e in exc.errors],
        ) from None
    graph = build_state_graph(curriculum)
    rows = _entries_to_rows(payload.assignment, graph)
    try:
        ProbabilityAssignment(rows=rows).validate_against(graph)
    except AssignmentError as exc:
        raise ApiError(422, "invalid-assignment", str(exc)) from None
    if any(v < 0 for v in payload.schedule.values()):
        raise ApiError(422, "invalid-schedule", "intakes must be nonnegative")


def _doc_payload(payload: ScenarioPayload) -> dict:
    return {
        "name": payload.name,
        "curriculum_source": payload.curriculum_source,
        "assignment": [
            {
                "from_state_id": e.from_state_id,
                "outcome": e.outcome,
                "target_selection": list(e.target_selection),
                "probability": e.probability,
            }
            for e in payload.assignment
        ],
        "schedule": {str(y): v for y, v in payload.schedule.items()},
        "horizon": payload.horizon,
    }


def _doc_to_parts(doc) -> tuple:
    curriculum = parse_curriculum(doc.curriculum_source)
    graph = build_state_graph(curriculum)
    entries = [AssignmentEntry(**raw) for raw in doc.assignment]
    assignment = ProbabilityAssignment(rows=_entries_to_rows(entries, graph))
    assignment.validate_against(graph)
    schedule = {int(y): v for y, v in doc.schedule.items()}
    return curriculum, graph, assignment, schedule


def create_app(store_dir: str | None = None) -> FastAPI:
    """Build the application around a scenario store directory."""
    root = store_dir or os.environ.get(DEFAULT_STORE_ENV, "scenarios")
    store = ScenarioStore(root)
    app = FastAPI(title="pathcast", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def handle_api_error(_: Request, exc: ApiError):
        return _error_response(exc.status, exc.code, exc.message, exc.details)

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(_: Request, exc: RequestValidationError):
        return _error_response(
            422,
            "invalid-request",
            "request body does not match the schema",
            [
                {"loc": [str(p) for p in err["loc"]], "message": err["msg"]}
                for err in exc.errors()
            ],
        )

    @app.exception_handler(ScenarioNotFound)
    async def handle_not_found(_: Request, exc: ScenarioNotFound):
        return _error_response(404, "not-found", f"no scenario {exc.scenario_id!r}", [])

    @app.exception_handler(VersionConflict)
    async def handle_conflict(_: Request, exc: VersionConflict):
        return _error_response(
            409,
            "version-conflict",
            str(exc),
            [{"expected": exc.expected, "actual": exc.actual}],
        )

    def _doc_json(doc) -> dict:
        return {
            "id": doc.id,
            "name": doc.name,
            "curriculum_source": doc.curriculum_source,
            "assignment": doc.assignment,
            "schedule": doc.schedule,
            "horizon": doc.horizon,
            "version": doc.version,
        }

    @app.post("/scenarios", status_code=201)
    def create_scenario(payload: ScenarioPayload):
        _validate_scenario(payload)
        doc = store.create(_doc_payload(payload))
        return _doc_json(doc)

    @app.get("/scenarios")
    def list_scenarios():
        return [_doc_json(doc) for doc in store.list()]

    @app.get("/scenarios/{scenario_id}")
    def read_scenario(scenario_id: str):
        return _doc_json(store.get(scenario_id))

    @app.put("/scenarios/{scenario_id}")
    def update_scenario(scenario_id: str, payload: ScenarioUpdate):
        _validate_scenario(payload)
        doc = store.update(scenario_id, payload.expected_version, _doc_payload(payload))
        return _doc_json(doc)

    @app.delete("/scenarios/{scenario_id}", status_code=204)
    def delete_scenario(scenario_id: str):
        store.delete(scenario_id)

    @app.post("/scenarios/{scenario_id}/project")
    def project_scenario(scenario_id: str, overrides: Overrides | None = None):
        doc = store.get(scenario_id)
        curriculum, graph, assignment, schedule = _doc_to_parts(doc)
        horizon = doc.horizon
        if overrides is not None:
            if overrides.assignment:
                by_state: dict[str, dict[OutcomeKey, float]] = {}
                for e in overrides.assignment:
                    key: OutcomeKey = (e.outcome, tuple(sorted(e.target_selection)))
                    by_state.setdefault(e.from_state_id, {})[key] = e.probability
                try:
                    assignment = apply_overrides(
                        graph, assignment, by_state, renormalize=overrides.renormalize
                    )
                except (AssignmentError, KeyError) as exc:
                    raise ApiError(422, "invalid-override", str(exc)) from None
            if overrides.schedule is not None:
                if any(v < 0 for v in overrides.schedule.values()):
                    raise ApiError(422, "invalid-schedule", "intakes must be nonnegative")
                schedule = dict(overrides.schedule)
            if overrides.horizon is not None:
                horizon = overrides.horizon
        try:
            run = run_projection(curriculum, assignment, schedule, horizon, graph=graph)
        except ValueError as exc:
            raise ApiError(422, "invalid-projection", str(exc)) from None
        return run.to_json()

    @app.post("/scenarios/{scenario_id}/simulate")
    def simulate_scenario(scenario_id: str, request: SimulationRequest):
        doc = store.get(scenario_id)
        curriculum, graph, assignment, schedule = _doc_to_parts(doc)
        try:
            cfg = SimulationConfig(
                replicas=request.replicas,
                seed=request.seed,
                horizon=request.horizon or doc.horizon,
                schedule=schedule,
            )
        except ValueError as exc:
            raise ApiError(422, "invalid-simulation", str(exc)) from None
        result = run_simulation(curriculum, assignment, cfg, graph=graph)
        return result.to_summary()

    @app.get("/scenarios/{scenario_id}/graph")
    def scenario_graph(scenario_id: str, view: Literal["refined", "aggregate"] = "refined"):
        doc = store.get(scenario_id)
        curriculum = parse_curriculum(doc.curriculum_source)
        graph = build_state_graph(curriculum)
        if view == "aggregate":
            return json.loads(aggregate_to_json(aggregate_graph(graph)))
        return json.loads(graph_to_json(graph))

    return app


def main(port: int | None = None, store_dir: str | None = None) -> None:
    """Entry point used by the CLI ``serve`` subcommand."""
    import uvicorn

    resolved_port = port if port is not None else int(os.environ.get(DEFAULT_PORT_ENV, "8000"))
    uvicorn.run(create_app(store_dir), host="127.0.0.1", port=resolved_port)
