"""Delimited file schemas shared by the CLI, the service, and exports.

Probabilities are written with ``repr`` so reading our own output restores
bit-identical doubles.  All files are plain comma-separated with a header
row.

Schemas:

* assignment:  from_state_id, outcome, target_selection, probability
  (``target_selection`` joins module codes with ``;`` and is empty for
  repeat/dropout rows and for the final advance into eligibility)
* records:     student_id, academic_year, module_code, outcome
* intakes:     year, intake
* populations: year, state_id, population
* loads:       year, module_code, load
* absorption:  state_id, absorbing_state_id, probability, expected_years
"""

from __future__ import annotations

import csv
import io
from typing import Iterable, TextIO

from .estimate import EnrollmentRecord, PASS, FAIL, WITHDRAW
from .markov import (
    AbsorptionSummary,
    CohortSchedule,
    OutcomeKey,
    PopulationVector,
    ProbabilityAssignment,
)
from .pathspace import StateGraph

__all__ = [
    "write_assignment",
    "read_assignment",
    "write_records",
    "read_records",
    "write_intakes",
    "read_intakes",
    "write_populations",
    "write_module_loads",
    "write_absorption",
    "to_text",
]

_OUTCOMES = {PASS, FAIL, WITHDRAW}


def write_assignment(a: ProbabilityAssignment, g: StateGraph, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["from_state_id", "outcome", "target_selection", "probability"])
    for state_id, kind, selection, p in a.entries(g):
        writer.writerow([state_id, kind, ";".join(selection), repr(p)])


def read_assignment(src: TextIO, g: StateGraph) -> ProbabilityAssignment:
    reader = csv.DictReader(src)
    rows: dict[int, dict[OutcomeKey, float]] = {}
    for line, row in enumerate(reader, start=2):
        try:
            state = g.index_of(row["from_state_id"])
        except KeyError:
            raise ValueError(f"line {line}: unknown state {row['from_state_id']!r}") from None
        selection = tuple(sorted(c for c in row["target_selection"].split(";") if c))
        key: OutcomeKey = (row["outcome"], selection)
        try:
            p = float(row["probability"])
        except ValueError:
            raise ValueError(f"line {line}: bad probability {row['probability']!r}") from None
        rows.setdefault(state, {})[key] = p
    assignment = ProbabilityAssignment(rows=rows)
    assignment.validate_against(g)
    return assignment


def write_records(records: Iterable[EnrollmentRecord], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["student_id", "academic_year", "module_code", "outcome"])
    for r in records:
        for code in sorted(r.outcomes):
            writer.writerow([r.student, r.academic_year, code, r.outcomes[code]])


def read_records(src: TextIO) -> list[EnrollmentRecord]:
    reader = csv.DictReader(src)
    grouped: dict[tuple[str, int], dict[str, str]] = {}
    order: list[tuple[str, int]] = []
    for line, row in enumerate(reader, start=2):
        try:
            year = int(row["academic_year"])
        except ValueError:
            raise ValueError(f"line {line}: bad year {row['academic_year']!r}") from None
        outcome = row["outcome"]
        if outcome not in _OUTCOMES:
            raise ValueError(f"line {line}: bad outcome {outcome!r}")
        key = (row["student_id"], year)
        if key not in grouped:
            grouped[key] = {}
            order.append(key)
        module = row["module_code"]
        if module in grouped[key]:
            raise ValueError(
                f"line {line}: duplicate module {module!r} for student"
                f" {key[0]!r} year {year}"
            )
        grouped[key][module] = outcome
    return [
        EnrollmentRecord(student=student, academic_year=year, outcomes=grouped[(student, year)])
        for student, year in order
    ]


def write_intakes(schedule: CohortSchedule, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["year", "intake"])
    for year in sorted(schedule):
        writer.writerow([year, repr(float(schedule[year]))])


def read_intakes(src: TextIO) -> CohortSchedule:
    reader = csv.DictReader(src)
    schedule: CohortSchedule = {}
    for line, row in enumerate(reader, start=2):
        try:
            year = int(row["year"])
            intake = float(row["intake"])
        except ValueError:
            raise ValueError(f"line {line}: bad intake row {row!r}") from None
        if year in schedule:
            raise ValueError(f"line {line}: duplicate year {year}")
        schedule[year] = intake
    return schedule


def write_populations(vectors: list[PopulationVector], order: tuple[str, ...], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["year", "state_id", "population"])
    for v in vectors:
        for state_id, value in zip(order, v.values):
            writer.writerow([v.year_index, state_id, repr(float(value))])


def write_module_loads(loads: dict[int, dict[str, float]], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["year", "module_code", "load"])
    for year in sorted(loads):
        for code in sorted(loads[year]):
            writer.writerow([year, code, repr(float(loads[year][code]))])


def write_absorption(summary: AbsorptionSummary, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["state_id", "absorbing_state_id", "probability", "expected_years"])
    for i, state_id in enumerate(summary.state_ids):
        expected = repr(float(summary.expected_years[i]))
        for j, eligible_id in enumerate(summary.eligible_ids):
            writer.writerow([state_id, eligible_id, repr(float(summary.graduation[i, j])), expected])
        writer.writerow([state_id, "dropout", repr(float(summary.dropout[i])), expected])


def to_text(write, *args) -> str:
    """Run one of the writers into a string."""
    buffer = io.StringIO()
    write(*args, buffer)
    return buffer.getvalue()
