import pytest
from fastapi.testclient import TestClient

from conftest import flat_assignment
from pathcast.fixtures import msc_is_source
from pathcast.service import create_app


def assignment_entries(graph, assignment):
    return [
        {
            "from_state_id": state_id,
            "outcome": kind,
            "target_selection": list(selection),
            "probability": p,
        }
        for state_id, kind, selection, p in assignment.entries(graph)
    ]


@pytest.fixture()
def client(tmp_path):
    app = create_app(store_dir=str(tmp_path / "scenarios"))
    with TestClient(app) as c:
        yield c


@pytest.fixture()
def payload(msc_graph):
    return {
        "name": "baseline",
        "curriculum_source": msc_is_source(),
        "assignment": assignment_entries(msc_graph, flat_assignment(msc_graph)),
        "schedule": {"2000": 100.0},
        "horizon": 6,
    }


def create_scenario(client, payload):
    response = client.post("/scenarios", json=payload)
    assert response.status_code == 201, response.text
    return response.json()


class TestCrud:
    def test_create(self, client, payload):
        doc = create_scenario(client, payload)
        assert doc["version"] == 1 and doc["id"]

    def test_get_and_list(self, client, payload):
        doc = create_scenario(client, payload)
        assert client.get(f"/scenarios/{doc['id']}").json()["name"] == "baseline"
        assert [d["id"] for d in client.get("/scenarios").json()] == [doc["id"]]

    def test_update_and_conflict(self, client, payload):
        doc = create_scenario(client, payload)
        response = client.put(
            f"/scenarios/{doc['id']}",
            json={**payload, "horizon": 8, "expected_version": 1},
        )
        assert response.status_code == 200 and response.json()["version"] == 2
        stale = client.put(
            f"/scenarios/{doc['id']}",
            json={**payload, "horizon": 9, "expected_version": 1},
        )
        assert stale.status_code == 409
        assert stale.json()["code"] == "version-conflict"

    def test_delete(self, client, payload):
        doc = create_scenario(client, payload)
        assert client.delete(f"/scenarios/{doc['id']}").status_code == 204
        assert client.get(f"/scenarios/{doc['id']}").status_code == 404

    def test_unknown_id_404_body(self, client):
        response = client.get("/scenarios/zzz")
        assert response.status_code == 404
        body = response.json()
        assert {"code", "message", "details"} <= set(body)

    def test_cyclic_curriculum_rejected(self, client, payload):
        bad = dict(payload)
        bad["curriculum_source"] = (
            'program "P"\n'
            "module A level junior compulsory year 1\n"
            "module B level junior compulsory year 1\n"
            "constraint hard A -> B\n"
            "constraint hard B -> A\n"
            "rule thesis_after 2\n"
        )
        response = client.post("/scenarios", json=bad)
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "invalid-curriculum"
        assert any("precedence cycle" in d["message"] for d in body["details"])

    def test_assignment_must_match_graph(self, client, payload):
        bad = dict(payload)
        bad["assignment"] = payload["assignment"][:3]
        response = client.post("/scenarios", json=bad)
        assert response.status_code == 422
        assert response.json()["code"] == "invalid-assignment"


class TestProject:
    def test_plain_run(self, client, payload):
        doc = create_scenario(client, payload)
        response = client.post(f"/scenarios/{doc['id']}/project", json={})
        assert response.status_code == 200
        body = response.json()
        assert len(body["populations"]) == 6
        assert body["populations"][0]["values"]["start"] == 100.0
        assert body["absorption"] is not None
        assert body["effective_assignment"]

    def test_run_does_not_mutate_scenario(self, client, payload):
        doc = create_scenario(client, payload)
        client.post(
            f"/scenarios/{doc['id']}/project",
            json={"assignment": [
                {
                    "from_state_id": "50|50",
                    "outcome": "dropout",
                    "target_selection": [],
                    "probability": 0.5,
                }
            ]},
        )
        assert client.get(f"/scenarios/{doc['id']}").json() == doc

    def test_renormalized_override_increases_dropout(self, client, payload):
        doc = create_scenario(client, payload)
        base = client.post(f"/scenarios/{doc['id']}/project", json={}).json()
        bumped = client.post(
            f"/scenarios/{doc['id']}/project",
            json={
                "assignment": [
                    {
                        "from_state_id": "50|50",
                        "outcome": "dropout",
                        "target_selection": [],
                        "probability": 0.5,
                    }
                ],
                "renormalize": True,
            },
        ).json()
        for n in (3, 5):
            low = base["populations"][n]["values"]["dropout"]
            high = bumped["populations"][n]["values"]["dropout"]
            assert high > low
        # the effective assignment echoes the renormalized row
        row = {
            (e["outcome"], tuple(e["target_selection"])): e["probability"]
            for e in bumped["effective_assignment"]
            if e["from_state_id"] == "50|50"
        }
        assert row[("dropout", ())] == pytest.approx(0.5)
        assert sum(row.values()) == pytest.approx(1.0, abs=1e-9)

    def test_strict_override_row_sum_rejected(self, client, payload, msc_graph):
        doc = create_scenario(client, payload)
        base = flat_assignment(msc_graph)
        i = msc_graph.index_of("50|50")
        oversized = [
            {
                "from_state_id": "50|50",
                "outcome": kind,
                "target_selection": list(sel),
                "probability": p * 1.2,
            }
            for (kind, sel), p in base.rows[i].items()
        ]
        response = client.post(
            f"/scenarios/{doc['id']}/project",
            json={"assignment": oversized, "renormalize": False},
        )
        assert response.status_code == 422
        assert response.json()["code"] == "invalid-override"

    def test_schedule_and_horizon_override(self, client, payload):
        doc = create_scenario(client, payload)
        body = client.post(
            f"/scenarios/{doc['id']}/project",
            json={"schedule": {"2000": 10.0, "2001": 20.0}, "horizon": 3},
        ).json()
        assert len(body["populations"]) == 3
        assert body["populations"][1]["values"]["start"] == pytest.approx(20.0)


class TestSimulate:
    def test_deterministic_and_echoes_seed(self, client, payload):
        doc = create_scenario(client, payload)
        request = {"replicas": 500, "seed": 42}
        a = client.post(f"/scenarios/{doc['id']}/simulate", json=request)
        b = client.post(f"/scenarios/{doc['id']}/simulate", json=request)
        assert a.status_code == 200
        assert a.json()["seed"] == 42
        assert a.json() == b.json()

    def test_zero_replicas_rejected(self, client, payload):
        doc = create_scenario(client, payload)
        response = client.post(
            f"/scenarios/{doc['id']}/simulate", json={"replicas": 0, "seed": 1}
        )
        assert response.status_code == 422

    def test_agrees_with_projection(self, client, payload):
        doc = create_scenario(client, payload)
        projection = client.post(f"/scenarios/{doc['id']}/project", json={}).json()
        simulation = client.post(
            f"/scenarios/{doc['id']}/simulate", json={"replicas": 20000, "seed": 7}
        ).json()
        cells = {(c["year"], c["state"]): c for c in simulation["cells"]}
        ok = total = 0
        for t, pop in enumerate(projection["populations"]):
            year = pop["year"]
            for state, expected in pop["values"].items():
                cell = cells[(year, state)]
                total += 1
                if abs(cell["mean"] - expected) <= 3 * cell["se"] + 1e-9:
                    ok += 1
        assert ok / total >= 0.95


class TestEnvironment:
    def test_store_dir_from_env(self, tmp_path, monkeypatch, payload):
        monkeypatch.setenv("PATHCAST_STORE", str(tmp_path / "env-store"))
        app = create_app()  # no explicit directory: the env var decides
        with TestClient(app) as client:
            doc = create_scenario(client, payload)
        assert (tmp_path / "env-store" / doc["id"] / "v000001.json").exists()


class TestGraphView:
    def test_refined_and_aggregate(self, client, payload, msc_graph):
        doc = create_scenario(client, payload)
        refined = client.get(f"/scenarios/{doc['id']}/graph").json()
        assert len(refined["states"]) == len(msc_graph.states)
        aggregate = client.get(
            f"/scenarios/{doc['id']}/graph", params={"view": "aggregate"}
        ).json()
        assert len(aggregate["states"]) == 10

    def test_bad_view_rejected(self, client, payload):
        doc = create_scenario(client, payload)
        response = client.get(
            f"/scenarios/{doc['id']}/graph", params={"view": "sideways"}
        )
        assert response.status_code == 422
