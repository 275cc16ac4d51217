"""pathcast: population projection for self-paced degree programs.

Parse a curriculum's precedence constraints, enumerate the admissible
tuition paths, build the enrollment state graph, and project student
populations with an absorbing Markov chain, cross-checked by a per-student
Monte Carlo simulator.

Typical use:

    from pathcast import parse_curriculum, build_state_graph
    from pathcast.markov import build_matrix, project_cohorts

    curriculum = parse_curriculum(source_text)
    graph = build_state_graph(curriculum)
"""

from .curriculum import (
    ChoiceGroup,
    Curriculum,
    InvalidCurriculumError,
    ModuleDef,
    PrecedenceConstraint,
    ProgramRules,
    UnknownModuleError,
    Violation,
    admissible_selections,
    completion_sets,
    curriculum_issues,
    validate_curriculum,
)
from .dsl import (
    CurriculumSyntaxError,
    ParseError,
    SourceSpan,
    parse_curriculum,
    serialize_curriculum,
)
from .markov import (
    PopulationVector,
    ProbabilityAssignment,
    TransitionMatrix,
    absorption_summary,
    build_matrix,
    module_loads,
    project,
    project_cohorts,
)
from .pathspace import (
    EnrollmentState,
    StateGraph,
    TuitionPath,
    aggregate_graph,
    build_state_graph,
    enumerate_paths,
)
from .simulate import SimulationConfig, SimulationResult, generate_records, simulate

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # curriculum
    "ModuleDef",
    "PrecedenceConstraint",
    "ChoiceGroup",
    "ProgramRules",
    "Curriculum",
    "Violation",
    "InvalidCurriculumError",
    "UnknownModuleError",
    "curriculum_issues",
    "validate_curriculum",
    "completion_sets",
    "admissible_selections",
    # dsl
    "SourceSpan",
    "ParseError",
    "CurriculumSyntaxError",
    "parse_curriculum",
    "serialize_curriculum",
    # path space
    "TuitionPath",
    "EnrollmentState",
    "StateGraph",
    "enumerate_paths",
    "build_state_graph",
    "aggregate_graph",
    # markov
    "ProbabilityAssignment",
    "TransitionMatrix",
    "PopulationVector",
    "build_matrix",
    "project",
    "project_cohorts",
    "module_loads",
    "absorption_summary",
    # simulation
    "SimulationConfig",
    "SimulationResult",
    "simulate",
    "generate_records",
]
