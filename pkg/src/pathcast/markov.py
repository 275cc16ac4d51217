"""Transition matrices and population projection over the state graph.

The yearly dynamics are an absorbing Markov chain: a row-stochastic matrix P
over the canonical state order, applied one step per academic year to a
vector of expected student counts.  Eligible and dropout states absorb; the
start state distributes registrants over the first-year selections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .pathspace import ACTIVE, START, Edge, StateGraph
from .rng import uniforms

ROW_SUM_TOLERANCE = 1e-9

__all__ = [
    "ROW_SUM_TOLERANCE",
    "OutcomeKey",
    "outcome_key",
    "edge_outcome",
    "AssignmentError",
    "ProbabilityAssignment",
    "TransitionMatrix",
    "PopulationVector",
    "CohortSchedule",
    "build_matrix",
    "project",
    "project_cohorts",
    "module_loads",
    "AbsorptionSummary",
    "absorption_summary",
    "random_assignment",
    "apply_overrides",
]

#: An outcome at a state: ("advance", sorted selection tuple), ("repeat", ())
#: or ("dropout", ()).  The empty advance selection is the final pass into
#: thesis eligibility.
OutcomeKey = tuple[str, tuple[str, ...]]


def outcome_key(kind: str, selection=()) -> OutcomeKey:
    return (kind, tuple(sorted(selection)))


def edge_outcome(e: Edge) -> OutcomeKey:
    return (e.kind, tuple(sorted(e.selection)))


class AssignmentError(ValueError):
    """Probability assignment inconsistent with the state graph."""


@dataclass(frozen=True)
class ProbabilityAssignment:
    """Per-state outcome distributions over the graph's edges.

    ``rows`` maps state index -> outcome key -> probability.  The support
    must be a subset of the state's outgoing edges (probability on anything
    else is an error), entries may omit zero-probability edges, and each
    stored row must sum to 1 within ``ROW_SUM_TOLERANCE``.
    """

    rows: dict[int, dict[OutcomeKey, float]] = field(default_factory=dict)

    def probability(self, state: int, key: OutcomeKey) -> float:
        return self.rows.get(state, {}).get(key, 0.0)

    def validate_against(self, g: StateGraph) -> None:
        for state, row in self.rows.items():
            if not 0 <= state < len(g.states):
                raise AssignmentError(f"no state with index {state}")
            tag = g.states[state].tag
            legal = {edge_outcome(e) for e in g.out_edges(state)}
            if tag not in (START, ACTIVE):
                raise AssignmentError(
                    f"state {g.states[state].id} is absorbing and takes no probabilities"
                )
            for key, p in row.items():
                if key not in legal:
                    raise AssignmentError(
                        f"probability on non-edge {key[0]}"
                        f"{':' + '+'.join(key[1]) if key[1] else ''}"
                        f" at state {g.states[state].id}"
                    )
                if not math.isfinite(p) or p < 0 or p > 1:
                    raise AssignmentError(
                        f"probability {p!r} out of range at state {g.states[state].id}"
                    )
            total = sum(row.values())
            if abs(total - 1.0) > ROW_SUM_TOLERANCE:
                raise AssignmentError(
                    f"probabilities at state {g.states[state].id} sum to {total!r}, not 1"
                )
        for state in [g.start_index, *g.active_indices]:
            if state not in self.rows:
                raise AssignmentError(
                    f"state {g.states[state].id} has no outcome distribution"
                )

    def entries(self, g: StateGraph) -> list[tuple[str, str, tuple[str, ...], float]]:
        """Flatten to (state id, outcome kind, selection, probability) rows
        in canonical edge order."""
        out = []
        for state in [g.start_index, *g.active_indices]:
            row = self.rows.get(state, {})
            for e in g.out_edges(state):
                key = edge_outcome(e)
                out.append((g.states[state].id, key[0], key[1], row.get(key, 0.0)))
        return out


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic matrix over the canonical state order."""

    order: tuple[str, ...]  # state ids
    P: np.ndarray

    def __post_init__(self):
        self.P.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class PopulationVector:
    """Expected student count per state for one calendar year."""

    values: np.ndarray
    year_index: int

    def __post_init__(self):
        if (self.values < 0).any():
            raise ValueError("population counts must be nonnegative")
        self.values.setflags(write=False)

    @property
    def total(self) -> float:
        return float(self.values.sum())


#: Calendar year -> nonnegative expected intake of newly admitted students.
CohortSchedule = dict[int, float]


def build_matrix(g: StateGraph, a: ProbabilityAssignment) -> TransitionMatrix:
    """Assemble the transition matrix from per-edge probabilities.

    Absorbing states (eligible, dropout) get a unit diagonal; every other
    row is the state's outcome distribution placed on its edge targets.
    """
    a.validate_against(g)
    n = len(g.states)
    P = np.zeros((n, n))
    for state in [g.start_index, *g.active_indices]:
        row = a.rows[state]
        for e in g.out_edges(state):
            P[state, e.dst] += row.get(edge_outcome(e), 0.0)
    for i in g.absorbing_indices:
        P[i, i] = 1.0
    sums = P.sum(axis=1)
    bad = np.where(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE)[0]
    if bad.size:
        raise AssignmentError(
            f"row {g.states[int(bad[0])].id} sums to {sums[int(bad[0])]!r}, not 1"
        )
    return TransitionMatrix(order=tuple(s.id for s in g.states), P=P)


def project(v1: PopulationVector, m: TransitionMatrix, n: int) -> PopulationVector:
    """Population after ``n`` years: v1 multiplied by P, n-1 times.

    Year 1 is the initial vector itself, matching the one-step-per-year
    convention; total mass is preserved because every row of P sums to 1.
    """
    if n < 1:
        raise ValueError("year count must be >= 1")
    if v1.values.shape != (m.size,):
        raise ValueError(
            f"vector has {v1.values.shape[0]} entries but the matrix has {m.size} states"
        )
    v = v1.values
    for _ in range(n - 1):
        v = v @ m.P
    return PopulationVector(values=v.copy(), year_index=v1.year_index + n - 1)


def project_cohorts(
    schedule: CohortSchedule, m: TransitionMatrix, horizon: int
) -> list[PopulationVector]:
    """Superpose one projection per annual intake.

    The vector for calendar year t is the sum over cohorts admitted in years
    y <= t of intake(y) placed at the start state and advanced t-y steps.
    Cohorts never interact, so the result is linear in the schedule.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if any(v < 0 for v in schedule.values()):
        raise ValueError("intakes must be nonnegative")
    first = min(schedule) if schedule else 0
    years = range(first, first + horizon)
    out_of_window = [y for y in schedule if y not in years]
    if out_of_window:
        raise ValueError(f"intake years outside the projection window: {sorted(out_of_window)}")

    start = m.order.index("start")
    vectors = []
    v = np.zeros(m.size)
    for t in years:
        v = v @ m.P if vectors else v
        v = v.copy()
        v[start] += schedule.get(t, 0.0)
        vectors.append(PopulationVector(values=v, year_index=t))
    return vectors


def module_loads(
    vectors: list[PopulationVector], g: StateGraph
) -> dict[int, dict[str, float]]:
    """Expected per-module enrollment counts for each projected year.

    A module's load in a year is the mass of every active state currently
    attending it; exactness is why states carry their current selection.
    """
    modules = sorted({code for s in g.states for code in s.current})
    loads: dict[int, dict[str, float]] = {}
    for v in vectors:
        if v.values.shape != (len(g.states),):
            raise ValueError("vector length does not match the graph")
        per_module = {m: 0.0 for m in modules}
        for i, s in enumerate(g.states):
            for code in s.current:
                per_module[code] += float(v.values[i])
        loads[v.year_index] = per_module
    return loads


@dataclass(frozen=True)
class AbsorptionSummary:
    """Standard absorbing-chain quantities for every transient state."""

    state_ids: tuple[str, ...]  # transient states, canonical order
    eligible_ids: tuple[str, ...]
    graduation: np.ndarray  # (transient, eligible) absorption probabilities
    dropout: np.ndarray  # (transient,) dropout absorption probability
    expected_years: np.ndarray  # (transient,) expected steps to absorption

    def for_state(self, state_id: str) -> dict:
        i = self.state_ids.index(state_id)
        return {
            "eligible": {
                e: float(self.graduation[i, j]) for j, e in enumerate(self.eligible_ids)
            },
            "dropout": float(self.dropout[i]),
            "expected_years": float(self.expected_years[i]),
        }


def absorption_summary(m: TransitionMatrix) -> AbsorptionSummary:
    """Solve the fundamental-matrix equations N = (I-Q)^-1, B = N R.

    Raises ValueError when some transient state cannot reach an absorbing
    state (the expected absorption time would be infinite).
    """
    P = m.P
    n = m.size
    absorbing = [i for i in range(n) if P[i, i] == 1.0 and P[i].sum() == 1.0]
    transient = [i for i in range(n) if i not in absorbing]
    if not absorbing:
        raise ValueError("chain has no absorbing state")

    # reachability of absorption through positive-probability steps
    reach = set(absorbing)
    changed = True
    while changed:
        changed = False
        for i in transient:
            if i in reach:
                continue
            if any(P[i, j] > 0 and j in reach for j in range(n)):
                reach.add(i)
                changed = True
    stranded = [i for i in transient if i not in reach]
    if stranded:
        raise ValueError(
            "states cannot reach absorption: "
            + ", ".join(m.order[i] for i in stranded)
        )

    Q = P[np.ix_(transient, transient)]
    R = P[np.ix_(transient, absorbing)]
    identity = np.eye(len(transient))
    try:
        N = np.linalg.solve(identity - Q, np.eye(len(transient)))
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"singular fundamental system: {exc}") from exc
    B = N @ R
    t = N @ np.ones(len(transient))

    eligible_cols = [k for k, i in enumerate(absorbing) if m.order[i].startswith("eligible:")]
    dropout_cols = [k for k, i in enumerate(absorbing) if not m.order[i].startswith("eligible:")]
    dropout_p = B[:, dropout_cols].sum(axis=1) if dropout_cols else np.zeros(len(transient))
    return AbsorptionSummary(
        state_ids=tuple(m.order[i] for i in transient),
        eligible_ids=tuple(m.order[absorbing[k]] for k in eligible_cols),
        graduation=B[:, eligible_cols],
        dropout=dropout_p,
        expected_years=t,
    )


def random_assignment(g: StateGraph, seed: int) -> ProbabilityAssignment:
    """Deterministic pseudo-random assignment, useful for experiments.

    Each state's outcome weights are counter-based uniforms offset away from
    zero, then normalized, so every legal outcome keeps meaningful mass and
    the result is reproducible across platforms.
    """
    rows: dict[int, dict[OutcomeKey, float]] = {}
    for state in [g.start_index, *g.active_indices]:
        edges = g.out_edges(state)
        u = uniforms(seed, state, np.arange(len(edges)), 0)
        weights = 0.1 + u
        weights /= weights.sum()
        rows[state] = {
            edge_outcome(e): float(w) for e, w in zip(edges, weights)
        }
    a = ProbabilityAssignment(rows=rows)
    a.validate_against(g)
    return a


def apply_overrides(
    g: StateGraph,
    base: ProbabilityAssignment,
    overrides: dict[str, dict[OutcomeKey, float]],
    renormalize: bool = True,
) -> ProbabilityAssignment:
    """Produce the effective assignment for a what-if run.

    ``overrides`` maps state ids to replacement probabilities for some of
    the state's outcomes.  With ``renormalize`` the untouched outcomes are
    scaled by (1 - overridden mass) / (their prior mass) so the row stays
    stochastic; without it the caller must supply a complete row that
    already sums to 1.
    """
    rows = {state: dict(row) for state, row in base.rows.items()}
    for state_id, replacement in overrides.items():
        state = g.index_of(state_id)
        legal = {edge_outcome(e) for e in g.out_edges(state)}
        for key, p in replacement.items():
            if key not in legal:
                raise AssignmentError(
                    f"override targets non-edge {key} at state {state_id}"
                )
            if not math.isfinite(p) or p < 0 or p > 1:
                raise AssignmentError(f"override probability {p!r} out of range")

        if renormalize:
            prior = rows.get(state, {})
            untouched = {k for k in legal if k not in replacement}
            overridden_mass = sum(replacement.values())
            if overridden_mass > 1 + ROW_SUM_TOLERANCE:
                raise AssignmentError(
                    f"overrides at {state_id} sum to {overridden_mass!r} > 1"
                )
            remainder = max(0.0, 1.0 - overridden_mass)
            prior_mass = sum(prior.get(k, 0.0) for k in untouched)
            row = dict(replacement)
            if prior_mass > 0:
                scale = remainder / prior_mass
                for k in untouched:
                    p = prior.get(k, 0.0)
                    if p:
                        row[k] = p * scale
            elif remainder > ROW_SUM_TOLERANCE:
                if not untouched:
                    raise AssignmentError(
                        f"overrides at {state_id} leave mass {remainder!r} unassigned"
                    )
                for k in sorted(untouched):
                    row[k] = remainder / len(untouched)
            rows[state] = row
        else:
            total = sum(replacement.values())
            if abs(total - 1.0) > ROW_SUM_TOLERANCE:
                raise AssignmentError(
                    f"strict override at {state_id} sums to {total!r}, not 1"
                )
            rows[state] = dict(replacement)

    result = ProbabilityAssignment(rows=rows)
    result.validate_against(g)
    return result
