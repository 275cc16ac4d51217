"""Estimate transition probabilities from historical enrollment records.

Each student's records are replayed as a walk on the state graph.  The step
from one academic year to the next is classified structurally:

* same selection again -> repeat,
* a new admissible selection -> advance,
* absent next year after passing a completing year -> the final advance
  into thesis eligibility,
* absent next year otherwise -> dropout.

Steps that land on the last recorded academic year of the whole data set
are right-censored (the following year simply is not in the data) and
contribute nothing.  Students whose records cannot be replayed on the graph
are reported and excluded; estimation never aborts because of them.

Counts are discounted by ``discount ** (reference_year - academic_year)``,
smoothed by adding ``smoothing`` to every legal outcome, and normalized.
States never visited fall back to an explicit, logged default distribution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .markov import OutcomeKey, ProbabilityAssignment, edge_outcome, outcome_key
from .pathspace import ACTIVE, ADVANCE, DROP, REPEAT, StateGraph

log = logging.getLogger(__name__)

PASS, FAIL, WITHDRAW = "pass", "fail", "withdraw"

__all__ = [
    "PASS",
    "FAIL",
    "WITHDRAW",
    "EnrollmentRecord",
    "EstimationDefaults",
    "EstimationResult",
    "estimate_probabilities",
]


@dataclass(frozen=True)
class EnrollmentRecord:
    """One student-year: the enrolled module set and per-module outcomes."""

    student: str
    academic_year: int
    outcomes: dict[str, str]  # module code -> pass | fail | withdraw

    @property
    def enrolled(self) -> frozenset[str]:
        return frozenset(self.outcomes)


@dataclass(frozen=True)
class EstimationDefaults:
    """Fallback distribution for states without evidence.

    ``advance`` mass is split evenly over the state's advance edges; states
    whose only advance edge is the final pass into eligibility put the whole
    advance share there.  Per-state overrides replace the generic split.
    """

    advance: float = 0.7
    repeat: float = 0.2
    dropout: float = 0.1
    per_state: dict[str, dict[OutcomeKey, float]] = field(default_factory=dict)

    def row(self, state_id: str, outcomes: list[OutcomeKey]) -> dict[OutcomeKey, float]:
        if state_id in self.per_state:
            return dict(self.per_state[state_id])
        advances = [k for k in outcomes if k[0] == ADVANCE]
        row: dict[OutcomeKey, float] = {}
        advance_mass, repeat_mass, dropout_mass = self.advance, self.repeat, self.dropout
        if (REPEAT, ()) not in outcomes:  # start state has advance edges only
            advance_mass = 1.0
            repeat_mass = dropout_mass = 0.0
        for k in advances:
            row[k] = advance_mass / len(advances)
        if (REPEAT, ()) in outcomes:
            row[(REPEAT, ())] = repeat_mass
        if (DROP, ()) in outcomes:
            row[(DROP, ())] = dropout_mass
        return row


@dataclass
class EstimationResult:
    assignment: ProbabilityAssignment
    visits: dict[int, float]  # state index -> discounted evidence mass
    defaulted_states: list[str]
    skipped_students: list[tuple[str, str]]  # (student, reason)


def _group_by_student(
    records: list[EnrollmentRecord],
) -> dict[str, dict[int, EnrollmentRecord]]:
    students: dict[str, dict[int, EnrollmentRecord]] = {}
    for r in records:
        if not r.outcomes:
            raise ValueError(f"record for {r.student!r} year {r.academic_year} is empty")
        years = students.setdefault(r.student, {})
        if r.academic_year in years:
            raise ValueError(
                f"student {r.student!r} has two records for year {r.academic_year}"
            )
        years[r.academic_year] = r
    return students


def _replay(
    g: StateGraph,
    years: dict[int, EnrollmentRecord],
    data_end: int,
) -> list[tuple[int, OutcomeKey, int]]:
    """Classify one student's walk into (state, outcome, year) steps.

    Raises ValueError with a human-readable reason when the records do not
    fit the graph.
    """
    steps: list[tuple[int, OutcomeKey, int]] = []
    ordered = sorted(years)
    first = ordered[0]

    # registration step: the first selection leaves the start state
    state = g.start_index
    start_edges = {edge_outcome(e): e for e in g.out_edges(state)}
    key = outcome_key(ADVANCE, years[first].enrolled)
    if key not in start_edges:
        raise ValueError(
            f"first-year selection {{{','.join(sorted(years[first].enrolled))}}}"
            " is not a legal registration"
        )
    steps.append((state, key, first))
    state = start_edges[key].dst

    for year in ordered:
        record = years[year]
        if g.states[state].tag != ACTIVE or record.enrolled != g.states[state].current:
            raise ValueError(
                f"year {year} enrollment {{{','.join(sorted(record.enrolled))}}}"
                " does not match any reachable state"
            )
        next_year = year + 1
        edges = {edge_outcome(e): e for e in g.out_edges(state)}
        if next_year in years:
            enrolled_next = years[next_year].enrolled
            if enrolled_next == record.enrolled:
                key = (REPEAT, ())
            else:
                key = outcome_key(ADVANCE, enrolled_next)
                if key not in edges:
                    raise ValueError(
                        f"year {next_year} enrollment"
                        f" {{{','.join(sorted(enrolled_next))}}} is not reachable"
                        f" from {g.states[state].id}"
                    )
            steps.append((state, key, year))
            state = edges[key].dst
            continue

        if any(y > year for y in ordered):
            raise ValueError(f"enrollment resumes after missing year {next_year}")
        if next_year > data_end:
            break  # right-censored: the data set simply ends here
        finishing = outcome_key(ADVANCE, ())
        passed_all = all(v == PASS for v in record.outcomes.values())
        if finishing in edges and passed_all:
            steps.append((state, finishing, year))
        else:
            steps.append((state, (DROP, ()), year))
        break

    return steps


def estimate_probabilities(
    records: list[EnrollmentRecord],
    g: StateGraph,
    smoothing: float = 1.0,
    discount: float = 1.0,
    reference_year: int | None = None,
    defaults: EstimationDefaults | None = None,
    data_end_year: int | None = None,
    window_start_year: int | None = None,
) -> EstimationResult:
    """Turn raw records into a valid probability assignment.

    ``smoothing`` is the add-alpha pseudo-count per legal outcome;
    ``discount`` in (0, 1] down-weights old years geometrically relative to
    ``reference_year`` (default: the newest year in the data).  Whether old
    evidence should be windowed out entirely (``window_start_year``) or
    merely discounted is a policy knob, not a baked-in decision; walks still
    replay through pre-window years so the states stay aligned, only the
    counting skips them.
    """
    if smoothing < 0:
        raise ValueError("smoothing must be nonnegative")
    if not 0 < discount <= 1:
        raise ValueError("discount must be in (0, 1]")
    defaults = defaults or EstimationDefaults()

    students = _group_by_student(records)
    if data_end_year is None:
        data_end_year = max((r.academic_year for r in records), default=0)
    if reference_year is None:
        reference_year = data_end_year

    counts: dict[int, dict[OutcomeKey, float]] = {}
    skipped: list[tuple[str, str]] = []
    for student in sorted(students):
        try:
            steps = _replay(g, students[student], data_end_year)
        except ValueError as exc:
            skipped.append((student, str(exc)))
            continue
        for state, key, year in steps:
            if window_start_year is not None and year < window_start_year:
                continue
            weight = discount ** (reference_year - year)
            counts.setdefault(state, {})[key] = counts.get(state, {}).get(key, 0.0) + weight

    rows: dict[int, dict[OutcomeKey, float]] = {}
    visits: dict[int, float] = {}
    defaulted: list[str] = []
    for state in [g.start_index, *g.active_indices]:
        legal = [edge_outcome(e) for e in g.out_edges(state)]
        observed = counts.get(state, {})
        evidence = sum(observed.values())
        visits[state] = evidence
        if evidence == 0:
            rows[state] = defaults.row(g.states[state].id, legal)
            defaulted.append(g.states[state].id)
            continue
        total = evidence + smoothing * len(legal)
        rows[state] = {
            key: (observed.get(key, 0.0) + smoothing) / total for key in legal
        }

    if defaulted:
        log.info(
            "no evidence for %d state(s); default distribution applied: %s",
            len(defaulted),
            ", ".join(defaulted),
        )
    if skipped:
        log.warning("excluded %d unreplayable student(s)", len(skipped))

    assignment = ProbabilityAssignment(rows=rows)
    assignment.validate_against(g)
    return EstimationResult(
        assignment=assignment,
        visits=visits,
        defaulted_states=defaulted,
        skipped_students=skipped,
    )
