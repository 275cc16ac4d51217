"""Command-line interface.

    pathcast validate  FILE
    pathcast paths     FILE [--json]
    pathcast graph     FILE [--aggregate] [--dot]
    pathcast project   FILE --probs CSV --intakes CSV --horizon N [--outdir DIR]
    pathcast simulate  FILE --probs CSV --intakes CSV --horizon N
                            --replicas N --seed S [--outdir DIR] [--traces FILE]
    pathcast estimate  FILE --records CSV [--alpha A] [--lambda L]
                            [--reference-year Y] [-o OUT]
    pathcast serve     [--port P] [--store DIR]

Exit codes: 0 success, 1 validation/input errors, 2 usage errors.
``project`` and ``simulate`` print the populations CSV (respectively the
JSON summary) to stdout; with ``--outdir`` they write the full report, CSVs
and figures side by side.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import csvio
from .dsl import CurriculumSyntaxError, parse_curriculum
from .estimate import estimate_probabilities
from .markov import AssignmentError
from .pathspace import (
    aggregate_graph,
    aggregate_to_dot,
    aggregate_to_json,
    build_state_graph,
    enumerate_paths,
    graph_to_dot,
    graph_to_json,
)
from .pipeline import run_projection, run_simulation
from .simulate import SimulationConfig

__all__ = ["main"]


class CliError(Exception):
    """Input problem; prints to stderr and exits 1."""


def _load_curriculum(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    return parse_curriculum(text)


def _load_graph_and_assignment(args):
    curriculum = _load_curriculum(args.file)
    graph = build_state_graph(curriculum)
    try:
        with open(args.probs, encoding="utf-8") as fh:
            assignment = csvio.read_assignment(fh, graph)
    except OSError as exc:
        raise CliError(f"cannot read {args.probs}: {exc}") from exc
    except (ValueError, AssignmentError) as exc:
        raise CliError(f"bad probability file: {exc}") from exc
    return curriculum, graph, assignment


def _load_intakes(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return csvio.read_intakes(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise CliError(f"bad intake file: {exc}") from exc


def cmd_validate(args) -> int:
    _load_curriculum(args.file)
    print("OK")
    return 0


def cmd_paths(args) -> int:
    curriculum = _load_curriculum(args.file)
    paths = enumerate_paths(curriculum)
    if args.json:
        print(json.dumps([[sorted(year) for year in path] for path in paths]))
    else:
        for path in paths:
            print(" -> ".join("+".join(sorted(year)) for year in path))
    return 0


def cmd_graph(args) -> int:
    curriculum = _load_curriculum(args.file)
    graph = build_state_graph(curriculum)
    if args.aggregate:
        agg = aggregate_graph(graph)
        print(aggregate_to_dot(agg) if args.dot else aggregate_to_json(agg), end="")
    else:
        print(graph_to_dot(graph) if args.dot else graph_to_json(graph), end="")
    if not args.dot:
        print()
    return 0


def cmd_project(args) -> int:
    curriculum, graph, assignment = _load_graph_and_assignment(args)
    schedule = _load_intakes(args.intakes)
    try:
        run = run_projection(curriculum, assignment, schedule, args.horizon, graph=graph)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    if args.outdir:
        from .report import write_projection_report

        for path in write_projection_report(run, args.outdir):
            print(path)
    else:
        csvio.write_populations(run.vectors, run.matrix.order, sys.stdout)
    return 0


def cmd_simulate(args) -> int:
    curriculum, graph, assignment = _load_graph_and_assignment(args)
    schedule = _load_intakes(args.intakes)
    try:
        cfg = SimulationConfig(
            replicas=args.replicas,
            seed=args.seed,
            horizon=args.horizon,
            schedule=schedule,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    result = run_simulation(
        curriculum, assignment, cfg, graph=graph, keep_traces=bool(args.traces)
    )
    if args.traces:
        with open(args.traces, "w", encoding="utf-8") as fh:
            for cohort_year, walk in sorted((result.traces or {}).items()):
                for replica in range(walk.shape[0]):
                    fh.write(
                        json.dumps(
                            {
                                "cohort_year": cohort_year,
                                "replica": replica,
                                "states": [
                                    result.state_ids[i] for i in walk[replica].tolist()
                                ],
                            }
                        )
                        + "\n"
                    )
    if args.outdir:
        from .report import write_simulation_report

        write_simulation_report(result, graph, args.outdir)
    print(json.dumps(result.to_summary()))  # stdout JSON only, stderr stays clean
    return 0


def cmd_estimate(args) -> int:
    curriculum = _load_curriculum(args.file)
    graph = build_state_graph(curriculum)
    try:
        with open(args.records, encoding="utf-8") as fh:
            records = csvio.read_records(fh)
    except OSError as exc:
        raise CliError(f"cannot read {args.records}: {exc}") from exc
    except ValueError as exc:
        raise CliError(f"bad records file: {exc}") from exc
    try:
        result = estimate_probabilities(
            records,
            graph,
            smoothing=args.alpha,
            discount=args.discount,
            reference_year=args.reference_year,
            window_start_year=args.window_start,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    for student, reason in result.skipped_students:
        print(f"skipped {student}: {reason}", file=sys.stderr)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            csvio.write_assignment(result.assignment, graph, fh)
    else:
        csvio.write_assignment(result.assignment, graph, sys.stdout)
    return 0


def cmd_serve(args) -> int:
    from .service import main as serve_main

    serve_main(port=args.port, store_dir=args.store)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathcast",
        description="Population projection for self-paced degree programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a curriculum file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("paths", help="enumerate admissible tuition paths")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("graph", help="emit the enrollment state graph")
    p.add_argument("file")
    p.add_argument("--aggregate", action="store_true")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("project", help="project populations over a horizon")
    p.add_argument("file")
    p.add_argument("--probs", required=True)
    p.add_argument("--intakes", required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--outdir", help="write the full report (CSVs + figures) here")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("simulate", help="Monte Carlo simulation of students")
    p.add_argument("file")
    p.add_argument("--probs", required=True)
    p.add_argument("--intakes", required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--replicas", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", help="write the full report (CSVs + figures) here")
    p.add_argument("--traces", help="dump per-student walks as NDJSON to this file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate probabilities from records")
    p.add_argument("file")
    p.add_argument("--records", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--lambda", dest="discount", type=float, default=1.0)
    p.add_argument("--reference-year", type=int, default=None)
    p.add_argument("--window-start", type=int, default=None,
                   help="ignore evidence from academic years before this one")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("serve", help="run the scenario HTTP service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--store", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    # keep stderr clean for machine consumers; library warnings stay
    # available to embedders through normal logging configuration
    logging.basicConfig(level=logging.ERROR)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CurriculumSyntaxError as exc:
        for error in exc.errors:
            print(error, file=sys.stderr)
        return 1
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
