"""Per-student stochastic simulation over the enrollment state graph.

This is the independent counterpart to the matrix projection: every student
is walked through the graph one year at a time, sampling an outgoing edge
from the state's outcome distribution.  Agreement between the two engines
(law of large numbers) is the main cross-validation of the whole pipeline,
and :func:`generate_records` closes the loop by producing synthetic
enrollment records that estimation should invert.

Determinism contract: student (cohort_year, replica, step) consumes exactly
one counter-based uniform (see :mod:`pathcast.rng`), and aggregation is a
plain sum, so results are bit-identical regardless of execution order or
parallelism for a fixed master seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimate import FAIL, PASS, WITHDRAW, EnrollmentRecord
from .markov import CohortSchedule, ProbabilityAssignment, edge_outcome
from .pathspace import ACTIVE, DROPOUT, StateGraph
from .rng import uniforms

__all__ = ["SimulationConfig", "SimulationResult", "simulate", "generate_records"]


@dataclass(frozen=True)
class SimulationConfig:
    """Replica count per cohort, master seed, horizon, and intake schedule."""

    replicas: int
    seed: int
    horizon: int
    schedule: CohortSchedule

    def __post_init__(self):
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if any(v < 0 for v in self.schedule.values()):
            raise ValueError("intakes must be nonnegative")
        if self.schedule:
            first = min(self.schedule)
            late = [y for y in self.schedule if y >= first + self.horizon]
            if late:
                raise ValueError(f"intake years outside the horizon: {sorted(late)}")


@dataclass(frozen=True)
class SimulationResult:
    """Aggregated walks: raw counts, intake-scaled means, and standard errors.

    ``counts[t, s]`` is the number of simulated students in state ``s`` at
    year ``years[t]`` (every admitted student is in exactly one state each
    year, so a year's counts sum to the cumulative simulated intake).
    ``means`` rescale each cohort's occupancy to its scheduled intake, which
    makes them directly comparable to matrix projections; ``ses`` are the
    binomial standard errors of those means.
    """

    years: tuple[int, ...]
    state_ids: tuple[str, ...]
    counts: np.ndarray
    means: np.ndarray
    ses: np.ndarray
    module_loads: dict[int, dict[str, float]]
    seed: int
    replicas: int
    traces: dict[int, np.ndarray] | None = None  # cohort year -> (replicas, years)

    def to_summary(self) -> dict:
        """Machine-readable mean/standard-error summary per (year, state)."""
        cells = []
        for t, year in enumerate(self.years):
            for s, state_id in enumerate(self.state_ids):
                cells.append(
                    {
                        "year": year,
                        "state": state_id,
                        "count": int(self.counts[t, s]),
                        "mean": float(self.means[t, s]),
                        "se": float(self.ses[t, s]),
                    }
                )
        return {
            "seed": self.seed,
            "replicas": self.replicas,
            "years": list(self.years),
            "cells": cells,
            "module_loads": {
                str(year): loads for year, loads in sorted(self.module_loads.items())
            },
        }


@dataclass(frozen=True)
class _SamplingTables:
    """Per-state cumulative outcome probabilities in canonical edge order."""

    cumulative: np.ndarray  # (states, max out-degree), padded with 1.0
    target: np.ndarray  # (states, max out-degree) target state index
    edge_lists: list[list]  # per state, edges in sampling order


def _sampling_tables(g: StateGraph, a: ProbabilityAssignment) -> _SamplingTables:
    a.validate_against(g)
    n = len(g.states)
    per_state_edges: list[list] = [[] for _ in range(n)]
    for i in range(n):
        per_state_edges[i] = list(g.out_edges(i))
    width = max(1, max(len(e) for e in per_state_edges))
    cumulative = np.ones((n, width))
    target = np.tile(np.arange(n)[:, None], (1, width))
    for i, edges in enumerate(per_state_edges):
        if not edges:  # absorbing: stay put with probability 1
            continue
        acc = 0.0
        for j, e in enumerate(edges):
            acc += a.probability(i, edge_outcome(e))
            cumulative[i, j] = acc
            target[i, j] = e.dst
        cumulative[i, len(edges) - 1] = 1.0  # absorb rounding slack
        for j in range(len(edges), width):
            target[i, j] = edges[-1].dst
    return _SamplingTables(cumulative=cumulative, target=target, edge_lists=per_state_edges)


def _walk_cohort(
    tables: _SamplingTables,
    start_index: int,
    seed: int,
    cohort_year: int,
    replicas: int,
    steps: int,
) -> np.ndarray:
    """State matrix of shape (replicas, steps + 1); column 0 is the start."""
    states = np.full(replicas, start_index, dtype=np.int64)
    out = np.empty((replicas, steps + 1), dtype=np.int64)
    out[:, 0] = states
    replica_indices = np.arange(replicas)
    for k in range(steps):
        u = uniforms(seed, cohort_year, replica_indices, k)
        rows = tables.cumulative[states]
        choice = (u[:, None] >= rows).sum(axis=1)
        states = tables.target[states, choice]
        out[:, k + 1] = states
    return out


def simulate(
    g: StateGraph,
    a: ProbabilityAssignment,
    cfg: SimulationConfig,
    keep_traces: bool = False,
) -> SimulationResult:
    """Walk every simulated student through the graph and aggregate.

    Cohorts with zero scheduled intake are skipped.  Each simulated student
    of cohort y carries weight intake(y)/replicas in the means, aligning
    them with the matrix projection of the same schedule.
    """
    tables = _sampling_tables(g, a)
    first = min(cfg.schedule) if cfg.schedule else 0
    years = tuple(range(first, first + cfg.horizon))
    n = len(g.states)
    counts = np.zeros((cfg.horizon, n), dtype=np.int64)
    means = np.zeros((cfg.horizon, n))
    variances = np.zeros((cfg.horizon, n))
    traces: dict[int, np.ndarray] = {}

    for cohort_year in sorted(cfg.schedule):
        intake = cfg.schedule[cohort_year]
        if intake <= 0:
            continue
        offset = cohort_year - first
        steps = cfg.horizon - offset - 1
        walk = _walk_cohort(
            tables, g.start_index, cfg.seed, cohort_year, cfg.replicas, steps
        )
        if keep_traces:
            traces[cohort_year] = walk
        for k in range(steps + 1):
            cohort_counts = np.bincount(walk[:, k], minlength=n)
            counts[offset + k] += cohort_counts
            share = cohort_counts / cfg.replicas
            means[offset + k] += intake * share
            variances[offset + k] += intake**2 * share * (1 - share) / cfg.replicas

    ses = np.sqrt(variances)
    loads: dict[int, dict[str, float]] = {}
    modules = sorted({code for s in g.states for code in s.current})
    for t, year in enumerate(years):
        per_module = {m: 0.0 for m in modules}
        for i, s in enumerate(g.states):
            for code in s.current:
                per_module[code] += float(means[t, i])
        loads[year] = per_module

    return SimulationResult(
        years=years,
        state_ids=tuple(s.id for s in g.states),
        counts=counts,
        means=means,
        ses=ses,
        module_loads=loads,
        seed=cfg.seed,
        replicas=cfg.replicas,
        traces=traces if keep_traces else None,
    )


def generate_records(
    g: StateGraph,
    a: ProbabilityAssignment,
    cfg: SimulationConfig,
) -> list[EnrollmentRecord]:
    """Emit synthetic enrollment records consistent with sampled walks.

    Outcome semantics per enrolled year: advancing marks every current
    module passed; repeating marks the whole selection failed (the yearly
    outcome model cannot name a single culprit); dropping out marks the
    selection withdrawn.  Student ids are ``s{cohort_year}-{replica}``.
    """
    tables = _sampling_tables(g, a)
    first = min(cfg.schedule) if cfg.schedule else 0
    records: list[EnrollmentRecord] = []
    states = g.states

    for cohort_year in sorted(cfg.schedule):
        intake = cfg.schedule[cohort_year]
        if intake <= 0:
            continue
        offset = cohort_year - first
        # one extra step so the last in-window year has a sampled outcome
        steps = cfg.horizon - offset
        walk = _walk_cohort(
            tables, g.start_index, cfg.seed, cohort_year, cfg.replicas, steps
        )
        for replica in range(cfg.replicas):
            student = f"s{cohort_year}-{replica}"
            for k in range(1, steps):  # column 0 is the start state
                state = states[walk[replica, k]]
                if state.tag != ACTIVE:
                    break
                succ = states[walk[replica, k + 1]]
                if succ.tag == ACTIVE and walk[replica, k + 1] == walk[replica, k]:
                    mark = FAIL
                elif succ.tag == DROPOUT:
                    mark = WITHDRAW
                else:
                    mark = PASS
                records.append(
                    EnrollmentRecord(
                        student=student,
                        academic_year=cohort_year + k,
                        outcomes={code: mark for code in sorted(state.current)},
                    )
                )
    return records
