from __future__ import annotations

import json
import time

import pytest
from fastapi.testclient import TestClient

from threshtune import parse_profile
from threshtune.cli import main
from threshtune.service import create_app


@pytest.fixture()
def client():
    with TestClient(create_app(worker_count=2)) as c:
        yield c


def _upload(client, fixtures_dir, name="spam_model_1.csv", task="binary", positive="spam"):
    params = {"task": task}
    if positive:
        params["positive_label"] = positive
    response = client.post(
        "/api/datasets",
        params=params,
        content=(fixtures_dir / name).read_bytes(),
        headers={"content-type": "text/csv"},
    )
    assert response.status_code == 201, response.text
    return response.json()["dataset_id"]


def _wait_for(client, job_id, target=("done", "failed", "cancelled"), timeout=30.0):
    deadline = time.time() + timeout
    last = None
    while time.time() < deadline:
        last = client.get(f"/api/jobs/{job_id}").json()
        if last["status"] in target:
            return last
        time.sleep(0.02)
    raise AssertionError(f"job stuck in {last and last['status']}")


def test_health(client):
    response = client.get("/api/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_upload_returns_digest_id_and_summary(client, fixtures_dir):
    data = (fixtures_dir / "spam_model_1.csv").read_bytes()
    response = client.post("/api/datasets", params={"task": "binary", "positive_label": "spam"}, content=data)
    assert response.status_code == 201
    body = response.json()
    import hashlib

    assert body["dataset_id"] == hashlib.sha256(data).hexdigest()
    assert body["summary"]["record_count"] == 100


def test_upload_idempotent(client, fixtures_dir):
    first = _upload(client, fixtures_dir)
    second = _upload(client, fixtures_dir)
    assert first == second


def test_upload_parse_error_names_line(client):
    response = client.post("/api/datasets", params={"task": "multiclass"},
                           content=b"truth,score:a,score:b\na,0.1,0.2\na,0.3\n")
    assert response.status_code == 400
    body = response.json()
    assert body["code"] == "parse_error"
    assert body["detail"]["line"] == 3
    assert "line 3" in body["message"]


def test_upload_too_large_rejected(fixtures_dir):
    with TestClient(create_app(max_upload_bytes=64)) as small:
        response = small.post("/api/datasets", params={"task": "binary", "positive_label": "spam"},
                              content=(fixtures_dir / "spam_model_1.csv").read_bytes())
        assert response.status_code == 413
        assert response.json()["code"] == "payload_too_large"


def test_upload_requires_task(client):
    response = client.post("/api/datasets", content=b"truth,score:a,score:b\na,0.1,0.2\n")
    assert response.status_code == 400
    assert response.json()["code"] == "missing_task"


def test_summary_endpoint_matches_upload_body(client, fixtures_dir):
    dataset_id = _upload(client, fixtures_dir)
    response = client.get(f"/api/datasets/{dataset_id}/summary")
    assert response.status_code == 200
    assert response.json()["dataset_id"] == dataset_id


def test_summary_matches_cli_bytes(client, fixtures_dir, capsys):
    dataset_id = _upload(client, fixtures_dir)
    response = client.get(f"/api/datasets/{dataset_id}/summary")
    code = main(["summarize", str(fixtures_dir / "spam_model_1.csv"),
                 "--task", "binary", "--positive-label", "spam", "--format", "json"])
    assert code == 0
    assert response.content == capsys.readouterr().out.encode()


def test_unknown_dataset_404_with_structured_error(client):
    response = client.get("/api/datasets/deadbeef/summary")
    assert response.status_code == 404
    body = response.json()
    assert set(body) == {"code", "message", "detail"}
    assert body["code"] == "not_found"


def test_evaluate_matches_cli_bytes(client, fixtures_dir, capsys):
    dataset_id = _upload(client, fixtures_dir)
    response = client.post(f"/api/datasets/{dataset_id}/evaluate",
                           json={"default_threshold": 0.5})
    assert response.status_code == 200

    code = main(["evaluate", str(fixtures_dir / "spam_model_1.csv"),
                 "--task", "binary", "--positive-label", "spam",
                 "--threshold", "0.5", "--format", "json"])
    assert code == 0
    cli_out = capsys.readouterr().out
    assert response.content == cli_out.encode()


def test_evaluate_multilabel_threshold_zero(client, tmp_path):
    csv = b"truth,score:x,score:y\nx,0.7,0.2\nx;y,0.4,0.9\n"
    response = client.post("/api/datasets", params={"task": "multilabel"}, content=csv)
    dataset_id = response.json()["dataset_id"]
    result = client.post(f"/api/datasets/{dataset_id}/evaluate", json={"default_threshold": 0.0}).json()
    assert all(cell["mp"] == 0 for cell in result["confusion"]["per_label"].values())


def test_evaluate_task_mismatch_422(client, fixtures_dir):
    dataset_id = _upload(client, fixtures_dir)
    response = client.post(f"/api/datasets/{dataset_id}/evaluate",
                           json={"task": "multilabel", "default_threshold": 0.5})
    assert response.status_code == 422
    assert response.json()["code"] == "task_mismatch"


def test_evaluate_unknown_dataset_404(client):
    response = client.post("/api/datasets/none/evaluate", json={})
    assert response.status_code == 404


def test_optimize_job_lifecycle(client, fixtures_dir):
    dataset_id = _upload(client, fixtures_dir)
    submit = client.post(f"/api/datasets/{dataset_id}/optimize",
                         json={"settings": {"population_size": 20, "generations": 10, "rng_seed": 1}})
    assert submit.status_code == 202
    job_id = submit.json()["job_id"]

    statuses = []
    final = None
    for _ in range(500):
        state = client.get(f"/api/jobs/{job_id}").json()
        if not statuses or statuses[-1] != state["status"]:
            statuses.append(state["status"])
        if state["status"] in ("done", "failed", "cancelled"):
            final = state
            break
        time.sleep(0.01)
    assert final is not None and final["status"] == "done", statuses
    order = {"queued": 0, "running": 1, "done": 2}
    assert statuses == sorted(statuses, key=order.__getitem__), statuses
    assert final["result"]["front"]
    recommended = final["result"]["recommended_index"]
    assert 0 <= recommended < len(final["result"]["front"])


def test_job_progress_is_monotonic(client, fixtures_dir):
    dataset_id = _upload(client, fixtures_dir)
    submit = client.post(f"/api/datasets/{dataset_id}/optimize",
                         json={"settings": {"population_size": 20, "generations": 400, "rng_seed": 2}})
    job_id = submit.json()["job_id"]
    seen = []
    for _ in range(200):
        state = client.get(f"/api/jobs/{job_id}").json()
        seen.append(state["progress"]["generation"])
        if state["status"] in ("done", "failed", "cancelled"):
            break
        time.sleep(0.005)
    assert seen == sorted(seen)
    _wait_for(client, job_id)


def test_duplicate_submission_returns_existing_job(client, fixtures_dir):
    dataset_id = _upload(client, fixtures_dir)
    body = {"settings": {"population_size": 20, "generations": 20000, "rng_seed": 3}}
    first = client.post(f"/api/datasets/{dataset_id}/optimize", json=body)
    assert first.status_code == 202
    job_id = first.json()["job_id"]

    duplicate = client.post(f"/api/datasets/{dataset_id}/optimize", json=body)
    assert duplicate.status_code == 409
    assert duplicate.json()["detail"]["job_id"] == job_id

    different = client.post(f"/api/datasets/{dataset_id}/optimize",
                            json={"settings": {"population_size": 20, "generations": 20000, "rng_seed": 4}})
    assert different.status_code == 202
    assert different.json()["job_id"] != job_id

    for jid in (job_id, different.json()["job_id"]):
        cancelled = client.delete(f"/api/jobs/{jid}")
        assert cancelled.status_code == 200
        state = _wait_for(client, jid)
        assert state["status"] == "cancelled"
        assert state["result"] is None  # partial results are not exposed


def test_cancelled_job_has_no_result(client, fixtures_dir):
    dataset_id = _upload(client, fixtures_dir)
    submit = client.post(f"/api/datasets/{dataset_id}/optimize",
                         json={"settings": {"population_size": 20, "generations": 50000, "rng_seed": 5}})
    job_id = submit.json()["job_id"]
    client.delete(f"/api/jobs/{job_id}")
    state = _wait_for(client, job_id)
    assert state["status"] == "cancelled"
    assert state["result"] is None


def test_invalid_settings_rejected(client, fixtures_dir):
    dataset_id = _upload(client, fixtures_dir)
    response = client.post(f"/api/datasets/{dataset_id}/optimize",
                           json={"settings": {"population_size": 3}})
    assert response.status_code == 422
    assert response.json()["code"] == "invalid_settings"


def test_export_recommended_solution_round_trips(client, fixtures_dir):
    dataset_id = _upload(client, fixtures_dir)
    submit = client.post(f"/api/datasets/{dataset_id}/optimize",
                         json={"settings": {"population_size": 20, "generations": 15, "rng_seed": 6}})
    job_id = submit.json()["job_id"]
    _wait_for(client, job_id)

    response = client.post("/api/export", json={"dataset_id": dataset_id, "job_id": job_id})
    assert response.status_code == 200
    document = parse_profile(response.content)
    assert document.task.value == "binary"
    assert document.baseline is not None
    assert document.provenance.settings is not None
    assert "attachment" in response.headers["content-disposition"]
    assert ".threshy.json" in response.headers["content-disposition"]

    again = client.post("/api/export", json={"dataset_id": dataset_id, "job_id": job_id})
    assert again.content == response.content  # pure function of stored artifacts


def test_export_matches_cli_for_equal_inputs(client, fixtures_dir, tmp_path, capsys):
    dataset_id = _upload(client, fixtures_dir)
    settings = {"population_size": 20, "generations": 15, "rng_seed": 6}
    submit = client.post(f"/api/datasets/{dataset_id}/optimize", json={"settings": settings})
    job_id = submit.json()["job_id"]
    _wait_for(client, job_id)
    exported = client.post("/api/export", json={"dataset_id": dataset_id, "job_id": job_id}).content
    created_at = json.loads(exported)["provenance"]["created_at"]

    out_path = tmp_path / "cli.threshy.json"
    code = main(["optimize", str(fixtures_dir / "spam_model_1.csv"),
                 "--task", "binary", "--positive-label", "spam",
                 "--population", "20", "--generations", "15", "--seed", "6",
                 "--timestamp", created_at, "--out", str(out_path)])
    capsys.readouterr()
    assert code == 0
    assert out_path.read_bytes() == exported


def test_export_manual_thresholds(client, fixtures_dir):
    dataset_id = _upload(client, fixtures_dir)
    response = client.post("/api/export", json={
        "dataset_id": dataset_id,
        "thresholds": {"spam": 0.25, "ham": 0.0},
        "default_threshold": 0.5,
    })
    assert response.status_code == 200
    document = parse_profile(response.content)
    assert document.provenance.settings is None  # manual provenance
    assert document.thresholds["spam"] == 0.25


def test_export_invalid_solution_index(client, fixtures_dir):
    dataset_id = _upload(client, fixtures_dir)
    submit = client.post(f"/api/datasets/{dataset_id}/optimize",
                         json={"settings": {"population_size": 20, "generations": 10, "rng_seed": 8}})
    job_id = submit.json()["job_id"]
    _wait_for(client, job_id)
    response = client.post("/api/export",
                           json={"dataset_id": dataset_id, "job_id": job_id, "solution_index": 9999})
    assert response.status_code == 422
    assert response.json()["code"] == "invalid_solution_index"


def test_monitor_endpoint_pass_and_regress(client, fixtures_dir):
    dataset_id = _upload(client, fixtures_dir)
    profile_bytes = client.post("/api/export", json={
        "dataset_id": dataset_id,
        "thresholds": {"spam": 0.25, "ham": 0.0},
    }).content
    document = json.loads(profile_bytes)

    same = client.post("/api/monitor", json={"dataset_id": dataset_id, "profile": document})
    assert same.status_code == 200
    assert same.json()["verdict"] == "pass"

    degraded_id = _upload(client, fixtures_dir, name="spam_model_1_degraded.csv")
    worse = client.post("/api/monitor", json={"dataset_id": degraded_id, "profile": document})
    assert worse.status_code == 200  # verdict is payload, not transport status
    assert worse.json()["verdict"] == "regress"


def test_monitor_endpoint_requires_baseline(client, fixtures_dir):
    dataset_id = _upload(client, fixtures_dir)
    profile_bytes = client.post("/api/export", json={
        "dataset_id": dataset_id,
        "thresholds": {"spam": 0.25, "ham": 0.0},
    }).content
    document = json.loads(profile_bytes)
    document["baseline"] = None
    response = client.post("/api/monitor", json={"dataset_id": dataset_id, "profile": document})
    assert response.status_code == 422
    assert response.json()["code"] == "monitor_error"


def test_static_ui_served_when_present(tmp_path, fixtures_dir):
    (tmp_path / "index.html").write_text("<html><body>threshold workbench</body></html>")
    with TestClient(create_app(ui_dir=tmp_path)) as client:
        page = client.get("/")
        assert page.status_code == 200
        assert "threshold workbench" in page.text
        assert client.get("/api/health").status_code == 200
