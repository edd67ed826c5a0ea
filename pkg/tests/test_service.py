from __future__ import annotations

import json
import time

import pytest
from fastapi.testclient import TestClient

from gqe.service import create_app
from gqe.trainer import RUN_CSV_HEADER


@pytest.fixture(scope="module")
def client(h2_path):
    return TestClient(create_app())


@pytest.fixture(scope="module")
def h2_payload(h2_path):
    return json.loads(open(h2_path).read())


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_exact_endpoint(client, h2_payload):
    response = client.post("/exact", json={"hamiltonian": h2_payload})
    assert response.status_code == 200
    body = response.json()
    assert body["n_qubits"] == 4
    assert body["ground_energy"] == pytest.approx(-1.137, abs=1e-3)
    assert body["hf_energy"] == pytest.approx(-1.117, abs=2e-3)


def test_exact_rejects_malformed(client, h2_payload):
    broken = dict(h2_payload)
    broken["hf_occupation"] = [1, 1]
    response = client.post("/exact", json={"hamiltonian": broken})
    assert response.status_code == 422


def test_pool_from_hamiltonian(client, h2_payload):
    response = client.post(
        "/pool", json={"hamiltonian": h2_payload, "list_tokens": True}
    )
    assert response.status_code == 200
    body = response.json()
    assert body["size"] == 25
    assert body["n_singles"] == 2
    assert body["n_doubles"] == 1
    assert len(body["tokens"]) == 25
    assert body["tokens"][0]["kind"] == "identity"


def test_pool_from_counts(client):
    response = client.post("/pool", json={"n_electrons": 6, "n_qubits": 14})
    assert response.status_code == 200
    assert response.json()["size"] == 1633


def test_pool_needs_input(client):
    assert client.post("/pool", json={}).status_code == 422


def _submit_and_wait(client, payload, timeout_s=120.0) -> dict:
    submit = client.post("/train", json=payload)
    assert submit.status_code == 200
    job_id = submit.json()["job_id"]
    deadline = time.time() + timeout_s
    while time.time() < deadline:
        status = client.get(f"/train/{job_id}").json()
        if status["status"] in ("done", "failed"):
            return status
        time.sleep(0.2)
    raise TimeoutError("training job did not finish in time")


def test_train_job_lifecycle(client, h2_payload):
    payload = {
        "hamiltonian": h2_payload,
        "loss": "pdpo", "alpha": 0.5, "beta": 0.1, "seed": 42,
        "steps": 12, "samples_per_step": 4, "sequence_length": 6,
        "embed_dim": 16, "ff_dim": 32, "n_heads": 2, "n_layers": 1,
    }
    status = _submit_and_wait(client, payload)
    assert status["status"] == "done", status.get("error")
    assert status["steps_done"] == 12
    summary = status["summary"]
    assert summary["seed"] == 42
    assert len(summary["best_sequence"]) == 6
    assert summary["best_energy"] < -1.0

    job_id = status["job_id"]
    log = client.get(f"/train/{job_id}/log.csv")
    assert log.status_code == 200
    lines = log.text.splitlines()
    assert lines[0] == RUN_CSV_HEADER
    assert len(lines) == 13


def test_train_job_validation(client, h2_payload):
    payload = {"hamiltonian": h2_payload, "samples_per_step": 1, "steps": 5}
    assert client.post("/train", json=payload).status_code == 422


def test_job_not_found(client):
    assert client.get("/train/doesnotexist").status_code == 404


def test_log_of_unfinished_job_conflicts(client, h2_payload):
    payload = {
        "hamiltonian": h2_payload, "steps": 60, "samples_per_step": 4,
        "sequence_length": 6, "embed_dim": 16, "ff_dim": 32,
        "n_heads": 2, "n_layers": 1,
    }
    job_id = client.post("/train", json=payload).json()["job_id"]
    response = client.get(f"/train/{job_id}/log.csv")
    assert response.status_code in (409, 200)  # 200 only if it already finished


def test_aggregate_endpoint(client, h2_payload):
    payload = {
        "hamiltonian": h2_payload,
        "steps": 10, "samples_per_step": 4, "sequence_length": 6,
        "embed_dim": 16, "ff_dim": 32, "n_heads": 2, "n_layers": 1,
    }
    texts = []
    for seed in (1, 2):
        status = _submit_and_wait(client, {**payload, "seed": seed})
        assert status["status"] == "done"
        texts.append(client.get(f"/train/{status['job_id']}/log.csv").text)

    response = client.post("/aggregate", json={"csv_texts": texts, "block": 5})
    assert response.status_code == 200
    body = response.json()
    assert len(body["points"]) == 10
    for point in body["points"]:
        assert point["min"] <= point["mean"] <= point["max"]
    assert len(body["blocks"]) == 4  # 2 runs x 2 blocks


def test_aggregate_rejects_bad_header(client):
    response = client.post("/aggregate", json={"csv_texts": ["step,foo\n0,1\n"]})
    assert response.status_code == 422
