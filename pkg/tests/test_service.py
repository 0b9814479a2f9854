import warnings

import numpy as np
import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from fluidpricing.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


@pytest.fixture
def instance_payload():
    return {
        "theta": [1.0, 2.0],
        "solo_cost": [1.0, 1.0],
        "pair_cost": [[1.0, 1.01], [1.01, 1.0]],
        "lambda_lower": [1e-3, 1e-3],
        "lambda_upper": [10.0, 10.0],
    }


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_solve(client, instance_payload):
    r = client.post("/solve", json={"instance": instance_payload, "lambda": [0.5, 0.7]})
    assert r.status_code == 200
    body = r.json()
    assert body["objective"] == pytest.approx(0.83171905697, abs=1e-8)
    assert len(body["x"]) == 4
    assert len(body["gamma"]) == 2


def test_solve_validation_error(client, instance_payload):
    r = client.post("/solve", json={"instance": instance_payload, "lambda": [0.5, -1.0]})
    assert r.status_code == 422
    assert r.json()["kind"] == "validation"


def test_classify(client, instance_payload):
    r = client.post("/classify", json={"instance": instance_payload, "lambda": [0.5, 0.7]})
    assert r.status_code == 200
    assert r.json()["case_id"] == "FullyMatched"


def test_certify(client, instance_payload):
    r = client.post("/certify", json={"instance": instance_payload})
    assert r.status_code == 200
    body = r.json()
    assert body["verdict"] == "WeaklyConcaveCertified"
    assert body["rule"] == "Cor1_case_i"


def test_diagnose_hessian(client, instance_payload):
    r = client.post(
        "/diagnose/hessian", json={"instance": instance_payload, "lambda": [0.1, 0.1]}
    )
    assert r.status_code == 200
    body = r.json()
    assert body["smooth"] is True
    assert 0.02 <= body["eigenvalues"][-1] <= 0.04


def test_diagnose_partials(client, instance_payload):
    r = client.post(
        "/diagnose/partials",
        json={"instance": instance_payload, "lambda": [0.5, 0.7], "coord": 0},
    )
    assert r.status_code == 200
    body = r.json()
    assert body["left"] == pytest.approx(body["right"], abs=1e-4)
    bad = client.post(
        "/diagnose/partials",
        json={"instance": instance_payload, "lambda": [0.5, 0.7], "coord": 5},
    )
    assert bad.status_code == 422


def test_probe(client, instance_payload):
    r = client.post(
        "/probe", json={"instance": instance_payload, "n_samples": 100, "seed": 0}
    )
    assert r.status_code == 200
    body = r.json()
    assert body["violations"] == 0
    assert body["rho"] is not None


def test_price(client, instance_payload):
    demand = {"solo_length": [1.0, 1.0], "max_rate": [1.0, 1.0]}
    r = client.post(
        "/price",
        json={"instance": instance_payload, "demand": demand, "solver": "mm", "seed": 0},
    )
    assert r.status_code == 200
    body = r.json()
    assert body["converged"] is True
    traj = np.asarray(body["trajectory"])
    assert np.all(np.diff(traj) >= -1e-9)
    bad = client.post(
        "/price",
        json={"instance": instance_payload, "demand": demand, "solver": "nope"},
    )
    assert bad.status_code == 422


def test_benchmark(client, instance_payload):
    demand = {"solo_length": [1.0, 1.0], "max_rate": [1.0, 1.0]}
    r = client.post(
        "/benchmark",
        json={
            "instances": [
                {"instance_id": "a", "instance": instance_payload, "demand": demand}
            ],
            "solvers": ["MM", "PG:10"],
            "seeds": [0],
        },
    )
    assert r.status_code == 200
    assert len(r.json()["rows"]) == 2


def test_synth_and_ingest(client):
    r = client.post("/synth", json={"n_trips": 120, "seed": 0})
    assert r.status_code == 200
    trips = r.json()
    assert len(trips) == 120
    r2 = client.post(
        "/ingest",
        json={"trips": trips, "n_types": 3, "theta_mode": "equal", "theta": 1.0},
    )
    assert r2.status_code == 200
    body = r2.json()
    assert len(body["matching"]["theta"]) == 3
    assert len(body["cluster_centers"]) == 3


def test_examples_endpoint(client):
    r = client.get("/examples/1")
    assert r.status_code == 200
    assert r.json()["passed"] is True
    assert client.get("/examples/9").status_code == 404
