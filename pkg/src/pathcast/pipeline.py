"""The one projection/simulation core behind both the CLI and the service.

Keeping a single entry point guarantees that a result fetched over HTTP is
numerically identical to the one printed by the command line for the same
inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curriculum import Curriculum
from .markov import (
    AbsorptionSummary,
    CohortSchedule,
    PopulationVector,
    ProbabilityAssignment,
    TransitionMatrix,
    absorption_summary,
    build_matrix,
    module_loads,
    project_cohorts,
)
from .pathspace import StateGraph, build_state_graph
from .simulate import SimulationConfig, SimulationResult, simulate

__all__ = ["ProjectionRun", "run_projection", "run_simulation"]


@dataclass(frozen=True)
class ProjectionRun:
    """Everything a what-if run produces, ready for export."""

    graph: StateGraph
    matrix: TransitionMatrix
    assignment: ProbabilityAssignment  # the effective one actually used
    vectors: list[PopulationVector]
    loads: dict[int, dict[str, float]]
    absorption: AbsorptionSummary | None

    def to_json(self) -> dict:
        populations = [
            {
                "year": v.year_index,
                "values": {
                    state_id: float(value)
                    for state_id, value in zip(self.matrix.order, v.values)
                },
            }
            for v in self.vectors
        ]
        absorption = None
        if self.absorption is not None:
            absorption = {
                state_id: self.absorption.for_state(state_id)
                for state_id in self.absorption.state_ids
            }
        return {
            "states": list(self.matrix.order),
            "populations": populations,
            "module_loads": {
                str(year): loads for year, loads in sorted(self.loads.items())
            },
            "absorption": absorption,
            "effective_assignment": [
                {
                    "from_state_id": state_id,
                    "outcome": kind,
                    "target_selection": list(selection),
                    "probability": p,
                }
                for state_id, kind, selection, p in self.assignment.entries(self.graph)
            ],
        }


def run_projection(
    curriculum: Curriculum,
    assignment: ProbabilityAssignment,
    schedule: CohortSchedule,
    horizon: int,
    graph: StateGraph | None = None,
    with_absorption: bool = True,
) -> ProjectionRun:
    """Project populations and module loads for an intake schedule."""
    g = graph if graph is not None else build_state_graph(curriculum)
    matrix = build_matrix(g, assignment)
    vectors = project_cohorts(schedule, matrix, horizon)
    loads = module_loads(vectors, g)
    absorption = None
    if with_absorption:
        try:
            absorption = absorption_summary(matrix)
        except ValueError:
            absorption = None  # legitimate for chains that cannot absorb
    return ProjectionRun(
        graph=g,
        matrix=matrix,
        assignment=assignment,
        vectors=vectors,
        loads=loads,
        absorption=absorption,
    )


def run_simulation(
    curriculum: Curriculum,
    assignment: ProbabilityAssignment,
    cfg: SimulationConfig,
    graph: StateGraph | None = None,
    keep_traces: bool = False,
) -> SimulationResult:
    """Monte Carlo counterpart of :func:`run_projection`."""
    g = graph if graph is not None else build_state_graph(curriculum)
    return simulate(g, assignment, cfg, keep_traces=keep_traces)
