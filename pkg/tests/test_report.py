from conftest import flat_assignment
from pathcast.pipeline import run_projection, run_simulation
from pathcast.report import write_projection_report, write_simulation_report
from pathcast.simulate import SimulationConfig


def test_projection_report_files(tmp_path, msc, msc_graph):
    run = run_projection(
        msc, flat_assignment(msc_graph), {2000: 100.0}, 5, graph=msc_graph
    )
    written = write_projection_report(run, tmp_path / "out")
    names = sorted(p.name for p in written)
    assert names == [
        "absorption.csv",
        "module_loads.csv",
        "module_loads.png",
        "populations.csv",
        "populations.png",
    ]
    for path in written:
        assert path.exists() and path.stat().st_size > 0
    header = (tmp_path / "out" / "populations.csv").read_text().splitlines()[0]
    assert header == "year,state_id,population"


def test_simulation_report_files(tmp_path, msc, msc_graph):
    cfg = SimulationConfig(replicas=200, seed=1, horizon=4, schedule={2000: 50.0})
    result = run_simulation(msc, flat_assignment(msc_graph), cfg, graph=msc_graph)
    written = write_simulation_report(result, msc_graph, tmp_path / "sim")
    names = sorted(p.name for p in written)
    assert names == [
        "module_loads.csv",
        "module_loads.png",
        "populations.csv",
        "populations.png",
    ]
    for path in written:
        assert path.stat().st_size > 0
