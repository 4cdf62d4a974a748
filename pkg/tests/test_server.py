"""HTTP API tests over a fixture workspace."""

import pytest
from fastapi.testclient import TestClient

from iotsc.server import create_app
from iotsc.workspace import init_workspace

T0 = "2019-06-01T09:00:00+00:00"
T1 = "2019-06-01T09:30:00+00:00"


@pytest.fixture()
def workspace(tmp_path):
    return init_workspace(tmp_path / "ws", "demo")


@pytest.fixture()
def client(workspace):
    return TestClient(create_app(workspace))


def start_detection(client, artifact="greenhouse", inspector="ana",
                    technique="checklist", trial=1):
    created = client.post("/v1/sessions", json={
        "artifact_id": artifact, "inspector_id": inspector,
        "technique": technique, "trial": trial})
    assert created.status_code == 201
    session_id = created.json()["session_id"]
    started = client.post(f"/v1/sessions/{session_id}/start", json={"at": T0})
    assert started.status_code == 200
    return session_id


class TestScenarios:
    def test_list_fixture_documents(self, client):
        body = client.get("/v1/scenarios").json()
        assert [s["id"] for s in body] == ["greenhouse", "smart-farm"]
        assert all(s["ok"] and s["scenario_count"] >= 1 for s in body)

    def test_get_document(self, client):
        body = client.get("/v1/scenarios/greenhouse").json()
        assert body["document"]["header"]["domain"] == "agriculture"
        assert [s["id"] for s in body["document"]["scenarios"]] == ["SC01", "SC02"]
        assert "[HEADER]" in body["source"]

    def test_get_unknown_is_404(self, client):
        assert client.get("/v1/scenarios/nope").status_code == 404

    def test_check_endpoint(self, client):
        findings = client.post("/v1/scenarios/greenhouse/check").json()
        assert [f["question_id"] for f in findings] == ["Q18", "Q19", "Q11"]
        assert all(f["message"] for f in findings)


class TestChecklistEndpoint:
    def test_shape(self, client):
        body = client.get("/v1/checklist").json()
        assert len(body["questions"]) == 32
        assert body["questions"][0]["id"] == "Q01"
        assert len(body["arrangements"]) == 9
        # workspace override supplies names for two arrangements
        names = {a["id"]: a["name"] for a in body["arrangements"]}
        assert names["IIA-04"] == "Sensing and Actuation"


class TestSessions:
    def test_create_and_fetch(self, client):
        session_id = start_detection(client)
        body = client.get(f"/v1/sessions/{session_id}").json()
        assert body["phase"] == "detection"
        assert body["timer_running"] is True

    def test_post_discrepancy_in_detection_is_201(self, client):
        session_id = start_detection(client)
        response = client.post(f"/v1/sessions/{session_id}/discrepancies", json={
            "scenario_id": "SC01", "description": "actor missing",
            "defect_type": "omission", "question_id": "Q10",
            "flow_label": "", "step_number": 2})
        assert response.status_code == 201
        assert response.json()["discrepancy_id"] == f"{session_id}-D001"

    def test_post_discrepancy_in_collection_is_409(self, client):
        session_id = start_detection(client)
        client.post(f"/v1/sessions/{session_id}/stop", json={"at": T1})
        merged = client.post("/v1/collections", json={"session_ids": [session_id]})
        assert merged.status_code == 201
        response = client.post(f"/v1/sessions/{session_id}/discrepancies", json={
            "scenario_id": "SC01", "description": "too late",
            "defect_type": "omission", "line": 3})
        assert response.status_code == 409

    def test_answers_recorded(self, client):
        session_id = start_detection(client)
        response = client.put(f"/v1/sessions/{session_id}/answers/Q18",
                              json={"answer": "no"})
        assert response.status_code == 200
        assert response.json()["answers"] == {"Q18": "no"}

    def test_answers_rejected_for_adhoc(self, client):
        session_id = start_detection(client, inspector="bo", technique="ad-hoc")
        response = client.put(f"/v1/sessions/{session_id}/answers/Q18",
                              json={"answer": "no"})
        assert response.status_code == 409

    def test_elapsed_mirrors_timer(self, client):
        session_id = start_detection(client)
        stopped = client.post(f"/v1/sessions/{session_id}/stop", json={"at": T1})
        assert stopped.json()["elapsed_seconds"] == 1800


class TestCollections:
    def _collected(self, client):
        session_id = start_detection(client)
        for step, text in ((1, "first issue to log"), (1, "first issue log"), (3, "other")):
            client.post(f"/v1/sessions/{session_id}/discrepancies", json={
                "scenario_id": "SC01", "description": text,
                "defect_type": "omission", "flow_label": "", "step_number": step})
        client.post(f"/v1/sessions/{session_id}/stop", json={"at": T1})
        merged = client.post("/v1/collections", json={"session_ids": [session_id]})
        assert merged.status_code == 201
        return session_id, merged.json()

    def test_merge_marks_and_discriminate(self, client):
        session_id, merged = self._collected(client)
        cid = merged["collection_id"]
        ids = [d["discrepancy_id"] for d in merged["discrepancies"]]
        assert merged["distinct"] == 3

        linked = client.post(f"/v1/collections/{cid}/duplicates", json={
            "duplicate_id": ids[1], "target_id": ids[0]})
        assert linked.status_code == 200
        assert linked.json()["distinct"] == 2

        decided = client.post(f"/v1/collections/{cid}/discriminate", json={
            "decisions": {ids[0]: "defect", ids[2]: "false_positive"}})
        assert decided.status_code == 200
        body = decided.json()
        assert body["discriminated"] is True
        assert body["real_defects"] == 1
        session = client.get(f"/v1/sessions/{session_id}").json()
        assert session["phase"] == "discrimination"

    def test_incomplete_discrimination_is_400(self, client):
        _, merged = self._collected(client)
        cid = merged["collection_id"]
        ids = [d["discrepancy_id"] for d in merged["discrepancies"]]
        response = client.post(f"/v1/collections/{cid}/discriminate", json={
            "decisions": {ids[0]: "defect"}})
        assert response.status_code == 400
        assert ids[1] in response.json()["detail"]


class TestReports:
    def test_metrics_report_round_trip(self, client):
        session_id, merged = TestCollections()._collected(client)
        cid = merged["collection_id"]
        ids = [d["discrepancy_id"] for d in merged["discrepancies"]]
        client.post(f"/v1/collections/{cid}/discriminate", json={
            "decisions": {i: "defect" for i in ids}})
        body = client.get("/v1/reports/metrics").json()
        assert len(body["rows"]) == 1
        row = body["rows"][0]
        assert row["total_defects"] == 3
        assert row["mean_time_hours"] == "0.500"
        csv_body = client.get("/v1/reports/metrics.csv").text
        assert csv_body == body["csv"]
        assert csv_body.splitlines()[0].startswith("trial,technique,inspector")
