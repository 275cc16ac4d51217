import json

import pytest

from conftest import flat_assignment
from pathcast import csvio
from pathcast.cli import main
from pathcast.fixtures import msc_is_source, tiny_source


@pytest.fixture()
def msc_file(tmp_path):
    path = tmp_path / "msc.curriculum"
    path.write_text(msc_is_source(), encoding="utf-8")
    return str(path)


@pytest.fixture()
def tiny_file(tmp_path):
    path = tmp_path / "tiny.curriculum"
    path.write_text(tiny_source(), encoding="utf-8")
    return str(path)


@pytest.fixture()
def probs_file(tmp_path, msc_graph):
    path = tmp_path / "probs.csv"
    with path.open("w", encoding="utf-8") as fh:
        csvio.write_assignment(flat_assignment(msc_graph), msc_graph, fh)
    return str(path)


@pytest.fixture()
def intakes_file(tmp_path):
    path = tmp_path / "intakes.csv"
    path.write_text("year,intake\n2000,100.0\n", encoding="utf-8")
    return str(path)


class TestValidate:
    def test_valid_file(self, msc_file, capsys):
        assert main(["validate", msc_file]) == 0
        assert capsys.readouterr().out.strip() == "OK"

    def test_invalid_file_exit_1(self, tmp_path, capsys):
        path = tmp_path / "bad.curriculum"
        path.write_text(
            'program "P"\nmodule A level junior compulsory year 1\nconstraint hard A -> Z\n',
            encoding="utf-8",
        )
        assert main(["validate", str(path)]) == 1
        assert "undefined-module" in capsys.readouterr().err

    def test_missing_file_exit_1(self, capsys):
        assert main(["validate", "/no/such/file"]) == 1

    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_console_script_installed(self, msc_file):
        import subprocess

        done = subprocess.run(
            ["pathcast", "validate", msc_file], capture_output=True, text=True
        )
        assert done.returncode == 0 and done.stdout.strip() == "OK"
        usage = subprocess.run(["pathcast", "--nope"], capture_output=True)
        assert usage.returncode == 2


class TestPaths:
    def test_text_output(self, msc_file, capsys):
        assert main(["paths", msc_file]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 22
        assert "50 -> 51+60 -> 62" in lines

    def test_json_output(self, tiny_file, capsys):
        assert main(["paths", tiny_file, "--json"]) == 0
        assert json.loads(capsys.readouterr().out) == [[["A"], ["B"]]]


class TestGraph:
    def test_json(self, msc_file, capsys):
        assert main(["graph", msc_file]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["states"]) == 22

    def test_aggregate_dot(self, msc_file, capsys):
        assert main(["graph", msc_file, "--aggregate", "--dot"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("digraph") and "50+51+60+62" in out


class TestProject:
    def test_stdout_csv(self, msc_file, probs_file, intakes_file, capsys):
        code = main(
            ["project", msc_file, "--probs", probs_file, "--intakes", intakes_file,
             "--horizon", "4"]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "year,state_id,population"
        assert lines[1] == "2000,start,100.0"
        assert len(lines) == 1 + 4 * 22

    def test_outdir_report(self, msc_file, probs_file, intakes_file, tmp_path):
        outdir = tmp_path / "report"
        code = main(
            ["project", msc_file, "--probs", probs_file, "--intakes", intakes_file,
             "--horizon", "4", "--outdir", str(outdir)]
        )
        assert code == 0
        names = sorted(p.name for p in outdir.iterdir())
        assert names == [
            "absorption.csv",
            "module_loads.csv",
            "module_loads.png",
            "populations.csv",
            "populations.png",
        ]
        assert (outdir / "populations.png").stat().st_size > 0


class TestSimulate:
    def test_json_summary_stderr_free(self, msc_file, probs_file, intakes_file):
        import subprocess

        done = subprocess.run(
            ["pathcast", "simulate", msc_file, "--probs", probs_file,
             "--intakes", intakes_file, "--horizon", "4", "--replicas", "200",
             "--seed", "9"],
            capture_output=True,
            text=True,
        )
        assert done.returncode == 0
        assert done.stderr == ""
        summary = json.loads(done.stdout)
        assert summary["seed"] == 9 and summary["replicas"] == 200
        assert len(summary["cells"]) == 4 * 22

    def test_traces_ndjson(self, tiny_file, tmp_path, tiny_graph, capsys):
        probs = tmp_path / "tiny_probs.csv"
        with probs.open("w", encoding="utf-8") as fh:
            csvio.write_assignment(flat_assignment(tiny_graph), tiny_graph, fh)
        intakes = tmp_path / "tiny_intakes.csv"
        intakes.write_text("year,intake\n0,10.0\n", encoding="utf-8")
        traces = tmp_path / "traces.ndjson"
        code = main(
            ["simulate", str(tiny_file), "--probs", str(probs), "--intakes",
             str(intakes), "--horizon", "3", "--replicas", "10", "--seed", "1",
             "--traces", str(traces)]
        )
        assert code == 0
        rows = [json.loads(line) for line in traces.read_text().splitlines()]
        assert len(rows) == 10
        assert all(r["states"][0] == "start" for r in rows)


class TestEstimate:
    def test_round_trip_via_files(self, tiny_file, tmp_path, tiny_graph, capsys):
        records = tmp_path / "records.csv"
        records.write_text(
            "student_id,academic_year,module_code,outcome\n"
            "s1,2001,A,pass\n"
            "s1,2002,B,pass\n"
            "s2,2001,A,fail\n"
            "s2,2002,A,pass\n"
            "s2,2003,B,pass\n",
            encoding="utf-8",
        )
        code = main(
            ["estimate", str(tiny_file), "--records", str(records), "--alpha", "0"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("from_state_id,outcome,target_selection,probability")
        rows = {
            (r.split(",")[0], r.split(",")[1], r.split(",")[2]): float(r.split(",")[3])
            for r in out.strip().splitlines()[1:]
        }
        assert rows[("A|A", "repeat", "")] == pytest.approx(1 / 3)
        assert rows[("A|A", "advance", "B")] == pytest.approx(2 / 3)

    def test_bad_records_exit_1(self, tiny_file, tmp_path, capsys):
        records = tmp_path / "records.csv"
        records.write_text("student_id,academic_year,module_code,outcome\ns,20x0,A,pass\n")
        assert main(["estimate", str(tiny_file), "--records", str(records)]) == 1
