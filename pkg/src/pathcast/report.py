"""Render projection and simulation results to files.

A report directory holds the delimited outputs (populations, module loads,
absorption) together with rendered figures of the same numbers, so a run
can be eyeballed and post-processed from the same folder:

    populations.csv    module_loads.csv    absorption.csv
    populations.png    module_loads.png
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import csvio
from .markov import PopulationVector
from .pathspace import StateGraph, aggregate_graph
from .pipeline import ProjectionRun
from .simulate import SimulationResult

__all__ = ["write_projection_report", "write_simulation_report"]


def _population_figure(
    years: list[int],
    per_state: np.ndarray,
    state_ids: tuple[str, ...],
    g: StateGraph,
    path: Path,
) -> None:
    """Stacked yearly populations, grouped by cumulative selection set."""
    agg = aggregate_graph(g)
    bands = np.zeros((len(agg.nodes), len(years)))
    for i, _ in enumerate(state_ids):
        bands[agg.member_map[i]] += per_state[:, i]

    fig, ax = plt.subplots(figsize=(9, 5))
    ax.stackplot(years, bands, labels=agg.nodes)
    ax.set_xlabel("academic year")
    ax.set_ylabel("expected students")
    ax.set_title("Projected population by enrollment stage")
    ax.legend(loc="upper left", fontsize=7, ncol=2)
    ax.set_xticks(years)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _loads_figure(loads: dict[int, dict[str, float]], path: Path) -> None:
    years = sorted(loads)
    modules = sorted({m for per_year in loads.values() for m in per_year})
    fig, ax = plt.subplots(figsize=(9, 5))
    for module in modules:
        ax.plot(
            years,
            [loads[y].get(module, 0.0) for y in years],
            marker="o",
            label=f"module {module}",
        )
    ax.set_xlabel("academic year")
    ax.set_ylabel("expected enrollment")
    ax.set_title("Projected module loads")
    ax.legend(fontsize=8)
    ax.set_xticks(years)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_projection_report(run: ProjectionRun, outdir: str | Path) -> list[Path]:
    """Write CSVs and figures for a projection run; returns written paths."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    populations = out / "populations.csv"
    with populations.open("w", encoding="utf-8") as fh:
        csvio.write_populations(run.vectors, run.matrix.order, fh)
    written.append(populations)

    loads = out / "module_loads.csv"
    with loads.open("w", encoding="utf-8") as fh:
        csvio.write_module_loads(run.loads, fh)
    written.append(loads)

    if run.absorption is not None:
        absorption = out / "absorption.csv"
        with absorption.open("w", encoding="utf-8") as fh:
            csvio.write_absorption(run.absorption, fh)
        written.append(absorption)

    years = [v.year_index for v in run.vectors]
    per_state = np.vstack([v.values for v in run.vectors])
    pop_png = out / "populations.png"
    _population_figure(years, per_state, run.matrix.order, run.graph, pop_png)
    written.append(pop_png)

    loads_png = out / "module_loads.png"
    _loads_figure(run.loads, loads_png)
    written.append(loads_png)
    return written


def write_simulation_report(
    result: SimulationResult, g: StateGraph, outdir: str | Path
) -> list[Path]:
    """Write CSVs and figures for a simulation run; returns written paths."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    means = out / "populations.csv"
    vectors = [
        PopulationVector(values=result.means[t].copy(), year_index=year)
        for t, year in enumerate(result.years)
    ]
    with means.open("w", encoding="utf-8") as fh:
        csvio.write_populations(vectors, result.state_ids, fh)
    written.append(means)

    loads = out / "module_loads.csv"
    with loads.open("w", encoding="utf-8") as fh:
        csvio.write_module_loads(result.module_loads, fh)
    written.append(loads)

    pop_png = out / "populations.png"
    _population_figure(list(result.years), result.means, result.state_ids, g, pop_png)
    written.append(pop_png)

    loads_png = out / "module_loads.png"
    _loads_figure(result.module_loads, loads_png)
    written.append(loads_png)
    return written
