"""HTTP API tests over the in-process test client."""

import json

import pytest
from fastapi.testclient import TestClient

from benchforge.server import create_app
from benchforge.workflow import Workspace

TOKEN = "test-token"
AUTH = {"Authorization": f"Bearer {TOKEN}"}


@pytest.fixture()
def client(tmp_path, clock):
    ws = Workspace(tmp_path / "ws", clock=clock)
    app = create_app(workspace=ws, token=TOKEN)
    return TestClient(app)


@pytest.fixture()
def project(client, schema_ddl):
    resp = client.post("/api/projects", json={"name": "api-proj"},
                       headers=AUTH)
    assert resp.status_code == 200
    pid = resp.json()["project_id"]
    client.post(f"/api/projects/{pid}/schema", json={"data": schema_ddl},
                headers=AUTH)
    return pid


def ingest(client, pid, sql_text):
    return client.post(f"/api/projects/{pid}/queries",
                       json={"data": sql_text}, headers=AUTH)


class TestAuth:
    def test_health_is_open(self, client):
        resp = client.get("/api/health")
        assert resp.status_code == 200
        assert resp.json()["status"] == "ok"

    def test_mutation_without_token_is_401(self, client):
        resp = client.post("/api/projects", json={"name": "x"})
        assert resp.status_code == 401
        assert resp.json()["code"] == "unauthorized"

    def test_wrong_token_is_401(self, client):
        resp = client.post("/api/projects", json={"name": "x"},
                           headers={"Authorization": "Bearer wrong"})
        assert resp.status_code == 401

    def test_reads_do_not_require_token(self, client):
        assert client.get("/api/projects").status_code == 200


class TestProjects:
    def test_empty_listing(self, client):
        assert client.get("/api/projects").json() == []

    def test_create_and_get(self, client, project):
        doc = client.get(f"/api/projects/{project}").json()
        assert doc["name"] == "api-proj"
        assert doc["schema"] is not None
        assert doc["stats"]["items"] == 0

    def test_duplicate_name_409(self, client, project):
        resp = client.post("/api/projects", json={"name": "api-proj"},
                           headers=AUTH)
        assert resp.status_code == 409
        assert resp.json()["code"] == "duplicate_name"

    def test_unknown_project_404(self, client):
        resp = client.get("/api/projects/nope")
        assert resp.status_code == 404
        assert resp.json()["code"] == "unknown_project"


class TestAnnotationFlow:
    def test_ingest_report(self, client, project):
        resp = ingest(client, project,
                      "SELECT name FROM students;\nUPDATE t SET a = 1;")
        doc = resp.json()
        assert doc["accepted"] == 1
        assert doc["skipped_non_select"] == 1

    def test_next_returns_drafted_item(self, client, project):
        ingest(client, project, "SELECT name FROM students;")
        resp = client.post(f"/api/projects/{project}/next",
                           json={"annotator_id": "alice"}, headers=AUTH)
        item = resp.json()
        assert item["state"] == "drafted"
        assert len(item["candidates"]) == 4

    def test_next_on_empty_queue_404(self, client, project):
        resp = client.post(f"/api/projects/{project}/next",
                           json={"annotator_id": "alice"}, headers=AUTH)
        assert resp.status_code == 404
        assert resp.json()["code"] == "queue_empty"

    def test_stale_lease_is_409(self, client, project):
        ingest(client, project, "SELECT name FROM students;")
        item = client.post(f"/api/projects/{project}/next",
                           json={"annotator_id": "alice"},
                           headers=AUTH).json()
        resp = client.post(f"/api/items/{item['item_id']}/feedback", json={
            "annotator_id": "bob", "kind": "flag", "payload": {},
        }, headers=AUTH)
        assert resp.status_code == 409
        assert resp.json()["code"] == "lease_mismatch"

    def test_feedback_and_accept(self, client, project):
        ingest(client, project, "SELECT name FROM students;")
        item = client.post(f"/api/projects/{project}/next",
                           json={"annotator_id": "alice"},
                           headers=AUTH).json()
        cand = item["candidates"][0]
        resp = client.post(f"/api/items/{item['item_id']}/feedback", json={
            "annotator_id": "alice", "kind": "refine",
            "payload": {"note": "say which table"},
        }, headers=AUTH)
        assert resp.status_code == 200
        live = [c for c in resp.json()["candidates"]
                if c["status"] == "proposed"]
        assert all("say which table" in c["text"] for c in live)
        resp = client.post(f"/api/items/{item['item_id']}/accept", json={
            "annotator_id": "alice", "candidate_id": live[0]["candidate_id"],
        }, headers=AUTH)
        assert resp.json()["state"] == "accepted"

    def test_items_listing_with_state_filter(self, client, project):
        ingest(client, project,
               "SELECT name FROM students;\nSELECT year FROM terms;")
        client.post(f"/api/projects/{project}/next",
                    json={"annotator_id": "alice"}, headers=AUTH)
        pending = client.get(
            f"/api/projects/{project}/items?state=pending").json()
        drafted = client.get(
            f"/api/projects/{project}/items?state=drafted").json()
        assert len(pending) == 1
        assert len(drafted) == 1

    def test_get_item(self, client, project):
        ingest(client, project, "SELECT name FROM students;")
        item = client.post(f"/api/projects/{project}/next",
                           json={"annotator_id": "alice"},
                           headers=AUTH).json()
        doc = client.get(f"/api/items/{item['item_id']}").json()
        assert doc["item_id"] == item["item_id"]


class TestExportAndEvaluate:
    def _accept_all(self, client, project):
        while True:
            resp = client.post(f"/api/projects/{project}/next",
                               json={"annotator_id": "alice"}, headers=AUTH)
            if resp.status_code == 404:
                return
            item = resp.json()
            client.post(f"/api/items/{item['item_id']}/accept", json={
                "annotator_id": "alice",
                "candidate_id": item["candidates"][0]["candidate_id"],
            }, headers=AUTH)

    def test_export_empty_409(self, client, project):
        resp = client.post(f"/api/projects/{project}/export", headers=AUTH)
        assert resp.status_code == 409
        assert resp.json()["code"] == "nothing_accepted"

    def test_export_records(self, client, project):
        ingest(client, project, "SELECT name FROM students WHERE year = 2024;")
        self._accept_all(client, project)
        doc = client.post(f"/api/projects/{project}/export",
                          headers=AUTH).json()
        assert doc["count"] == 1
        record = doc["records"][0]
        assert record["sql"] == "SELECT name FROM students WHERE year = 2024"

    def test_evaluate(self, client, project, db_dir):
        ingest(client, project, "SELECT name FROM students WHERE year = 2024;")
        self._accept_all(client, project)
        resp = client.post(f"/api/projects/{project}/evaluate",
                           json={"db_dir": str(db_dir)}, headers=AUTH)
        doc = resp.json()
        assert doc["aggregates"]["execution_accuracy"] == 1.0
        assert doc["aggregates"]["level_histogram"]["5"] == 1

    def test_api_export_matches_engine_export(self, client, project,
                                              tmp_path):
        ingest(client, project, "SELECT name FROM students;")
        self._accept_all(client, project)
        api_records = client.post(f"/api/projects/{project}/export",
                                  headers=AUTH).json()["records"]
        ws = client.app.state.workspace
        engine_records = ws.get(project).export_records()
        assert api_records == json.loads(json.dumps(engine_records))
