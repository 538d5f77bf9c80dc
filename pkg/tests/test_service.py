import json
from pathlib import Path

from fastapi.testclient import TestClient

from merchcast.delphi import CATEGORIES, close_round, open_session, submit_scores
from merchcast.service import create_app
from tests.test_delphi import sheet

ADMIN = {"Authorization": "Bearer test-admin"}


def make_client(tmp_path, name="store"):
    app = create_app(tmp_path / name, admin_token="test-admin")
    return TestClient(app)


def scores_payload(total):
    scores = {}
    remaining = total
    for cat in CATEGORIES:
        take = min(5, remaining)
        scores[cat.value] = take
        remaining -= take
    return scores


def create_session(client, experts=("a", "b", "c"), samples=(1, 2), epsilon=2.0,
                   max_rounds=5, movies=None):
    resp = client.post("/v1/sessions", json={
        "experts": list(experts), "samples": list(samples),
        "epsilon": epsilon, "max_rounds": max_rounds,
        "movies": movies,
    }, headers=ADMIN)
    assert resp.status_code == 201
    return resp.json()


def expert_headers(doc, expert):
    return {"Authorization": f"Bearer {doc['expert_tokens'][expert]}"}


def submit(client, doc, expert, totals, round_index=1):
    sheets = [{"sample_id": s, "scores": scores_payload(t)} for s, t in totals.items()]
    return client.put(f"/v1/sessions/{doc['session_id']}/scores",
                      json={"round": round_index, "sheets": sheets},
                      headers=expert_headers(doc, expert))


class TestAuth:
    def test_admin_required_for_create(self, tmp_path):
        client = make_client(tmp_path)
        resp = client.post("/v1/sessions", json={"experts": ["a", "b"], "samples": [1]})
        assert resp.status_code == 401
        resp = client.post("/v1/sessions", json={"experts": ["a", "b"], "samples": [1]},
                           headers={"Authorization": "Bearer wrong"})
        assert resp.status_code == 401

    def test_expert_token_scoped(self, tmp_path):
        client = make_client(tmp_path)
        doc = create_session(client)
        sid = doc["session_id"]
        resp = client.get(f"/v1/sessions/{sid}/open",
                          headers={"Authorization": "Bearer forged"})
        assert resp.status_code == 401

    def test_unknown_session_404(self, tmp_path):
        client = make_client(tmp_path)
        resp = client.get("/v1/sessions/deadbeef/status", headers=ADMIN)
        assert resp.status_code == 404


class TestSessionLifecycle:
    def test_create_returns_token_per_expert(self, tmp_path):
        client = make_client(tmp_path)
        doc = create_session(client, experts=[f"e{i}" for i in range(20)],
                             samples=list(range(10)))
        assert len(doc["expert_tokens"]) == 20
        assert doc["round"] == 1

    def test_open_samples_listing(self, tmp_path):
        client = make_client(tmp_path)
        movies = {"1": {"film": "Example Film", "year": 2017}}
        doc = create_session(client, movies=movies)
        resp = client.get(f"/v1/sessions/{doc['session_id']}/open",
                          headers=expert_headers(doc, "a"))
        body = resp.json()
        assert body["round"] == 1
        assert len(body["samples"]) == 2
        assert body["samples"][0]["movie"] == {"film": "Example Film", "year": 2017}
        assert set(body["categories"]) == {c.value for c in CATEGORIES}

    def test_submit_and_close_produces_labels(self, tmp_path):
        client = make_client(tmp_path)
        doc = create_session(client)
        sid = doc["session_id"]
        for expert in ("a", "b", "c"):
            resp = submit(client, doc, expert, {1: 20, 2: 0})
            assert resp.status_code == 200
            assert resp.json()["totals"] == {"1": 20.0, "2": 0.0}
        resp = client.post(f"/v1/sessions/{sid}/rounds/1/close", headers=ADMIN)
        assert resp.status_code == 200
        assert resp.json()["complete"] is True
        resp = client.get(f"/v1/sessions/{sid}/labels", headers=ADMIN)
        assert resp.status_code == 200
        assert resp.text.splitlines() == [
            "sample_id,label,forced", "1,20,false", "2,0,false",
        ]

    def test_score_out_of_range_names_field(self, tmp_path):
        client = make_client(tmp_path)
        doc = create_session(client)
        payload = scores_payload(10)
        payload["toys"] = 7
        resp = client.put(f"/v1/sessions/{doc['session_id']}/scores",
                          json={"round": 1, "sheets": [
                              {"sample_id": 1, "scores": payload},
                              {"sample_id": 2, "scores": scores_payload(0)},
                          ]},
                          headers=expert_headers(doc, "a"))
        assert resp.status_code == 422
        assert "toys" in resp.json()["detail"]
        assert "[0, 5]" in resp.json()["detail"]

    def test_incomplete_sheet_422(self, tmp_path):
        client = make_client(tmp_path)
        doc = create_session(client)
        resp = submit(client, doc, "a", {1: 10})  # sample 2 missing
        assert resp.status_code == 422
        assert "2" in resp.json()["detail"]

    def test_close_before_submissions_409_lists_delinquents(self, tmp_path):
        client = make_client(tmp_path)
        doc = create_session(client)
        submit(client, doc, "a", {1: 5, 2: 5})
        resp = client.post(f"/v1/sessions/{doc['session_id']}/rounds/1/close",
                           headers=ADMIN)
        assert resp.status_code == 409
        assert "b" in resp.json()["detail"] and "c" in resp.json()["detail"]

    def test_submit_to_closed_round_409(self, tmp_path):
        client = make_client(tmp_path)
        doc = create_session(client, samples=(1,))
        for expert in ("a", "b", "c"):
            submit(client, doc, expert, {1: 10})
        client.post(f"/v1/sessions/{doc['session_id']}/rounds/1/close", headers=ADMIN)
        resp = submit(client, doc, "a", {1: 10})
        assert resp.status_code == 409

    def test_idempotent_close(self, tmp_path):
        client = make_client(tmp_path)
        doc = create_session(client, samples=(1,))
        for expert in ("a", "b", "c"):
            submit(client, doc, expert, {1: 10})
        sid = doc["session_id"]
        first = client.post(f"/v1/sessions/{sid}/rounds/1/close", headers=ADMIN)
        second = client.post(f"/v1/sessions/{sid}/rounds/1/close", headers=ADMIN)
        assert second.status_code == 200
        assert second.json()["results"] == first.json()["results"]

    def test_export_before_completion_409(self, tmp_path):
        client = make_client(tmp_path)
        doc = create_session(client)
        resp = client.get(f"/v1/sessions/{doc['session_id']}/labels", headers=ADMIN)
        assert resp.status_code == 409

    def test_status_tracks_progress(self, tmp_path):
        client = make_client(tmp_path)
        doc = create_session(client)
        sid = doc["session_id"]
        submit(client, doc, "a", {1: 5, 2: 5})
        status = client.get(f"/v1/sessions/{sid}/status", headers=ADMIN).json()
        assert status["pending_experts"] == ["b", "c"]
        assert status["open_samples"] == [1, 2]
        assert status["labeled"] == 0


class TestFeedback:
    def _two_round_session(self, client):
        doc = create_session(client, samples=(1,), epsilon=2.0)
        sid = doc["session_id"]
        for expert, total in (("a", 2), ("b", 3), ("c", 11)):
            submit(client, doc, expert, {1: total})
        client.post(f"/v1/sessions/{sid}/rounds/1/close", headers=ADMIN)
        return doc

    def test_feedback_payload_and_anonymity(self, tmp_path):
        client = make_client(tmp_path)
        doc = self._two_round_session(client)
        sid = doc["session_id"]
        payloads = []
        for expert in ("a", "b", "c"):
            resp = client.get(f"/v1/sessions/{sid}/feedback/1",
                              headers=expert_headers(doc, expert))
            assert resp.status_code == 200
            payloads.append(resp.json())
        assert payloads[0] == payloads[1] == payloads[2]
        text = json.dumps(payloads[0])
        for expert in ("a", "b", "c"):
            assert f'"{expert}"' not in text
        for token in doc["expert_tokens"].values():
            assert token not in text

    def test_feedback_before_close_409(self, tmp_path):
        client = make_client(tmp_path)
        doc = create_session(client)
        resp = client.get(f"/v1/sessions/{doc['session_id']}/feedback/1",
                          headers=expert_headers(doc, "a"))
        assert resp.status_code == 409

    def test_round_history_for_admin(self, tmp_path):
        client = make_client(tmp_path)
        doc = self._two_round_session(client)
        resp = client.get(f"/v1/sessions/{doc['session_id']}/rounds", headers=ADMIN)
        rounds = resp.json()["rounds"]
        assert rounds[0]["round"] == 1
        assert rounds[0]["results"][0]["n_scores"] == 3


class TestPersistence:
    def test_restart_mid_round_keeps_submissions(self, tmp_path):
        client = make_client(tmp_path, "shared")
        doc = create_session(client)
        submit(client, doc, "a", {1: 5, 2: 5})
        submit(client, doc, "b", {1: 5, 2: 5})
        # new app over the same store: replay the event log
        client2 = make_client(tmp_path, "shared")
        sid = doc["session_id"]
        status = client2.get(f"/v1/sessions/{sid}/status", headers=ADMIN).json()
        assert status["pending_experts"] == ["c"]
        sheets = [{"sample_id": s, "scores": scores_payload(5)} for s in (1, 2)]
        resp = client2.put(f"/v1/sessions/{sid}/scores",
                           json={"round": 1, "sheets": sheets},
                           headers=expert_headers(doc, "c"))
        assert resp.status_code == 200
        resp = client2.post(f"/v1/sessions/{sid}/rounds/1/close", headers=ADMIN)
        assert resp.status_code == 200 and resp.json()["complete"]

    def test_replay_reproduces_live_labels(self, tmp_path):
        client = make_client(tmp_path, "replay")
        doc = create_session(client, samples=(1, 2, 3))
        sid = doc["session_id"]
        for expert, base in (("a", 4), ("b", 5), ("c", 6)):
            submit(client, doc, expert, {1: base, 2: 0, 3: 20})
        client.post(f"/v1/sessions/{sid}/rounds/1/close", headers=ADMIN)
        live = client.get(f"/v1/sessions/{sid}/labels", headers=ADMIN).text
        replayed = make_client(tmp_path, "replay")
        again = replayed.get(f"/v1/sessions/{sid}/labels", headers=ADMIN).text
        assert live == again

    def test_submission_order_does_not_change_results(self, tmp_path):
        outcomes = []
        for name, order in (("fwd", ("a", "b", "c")), ("rev", ("c", "b", "a"))):
            client = make_client(tmp_path, name)
            doc = create_session(client, samples=(1,))
            for expert in order:
                submit(client, doc, expert, {1: {"a": 3, "b": 5, "c": 10}[expert]})
            resp = client.post(
                f"/v1/sessions/{doc['session_id']}/rounds/1/close", headers=ADMIN)
            outcomes.append(resp.json()["results"])
        assert outcomes[0] == outcomes[1]

    def test_storage_failure_is_503(self, tmp_path):
        client = make_client(tmp_path, "brittle")
        doc = create_session(client)
        service = client.app.state.service
        service.store_dir = Path("/nonexistent-merchcast-store")
        resp = submit(client, doc, "a", {1: 5, 2: 5})
        assert resp.status_code == 503
        assert "retry" in resp.json()["detail"]

    def test_snapshot_written_on_close(self, tmp_path):
        client = make_client(tmp_path, "snap")
        doc = create_session(client, samples=(1,))
        for expert in ("a", "b", "c"):
            submit(client, doc, expert, {1: 10})
        client.post(f"/v1/sessions/{doc['session_id']}/rounds/1/close", headers=ADMIN)
        snap = tmp_path / "snap" / f"{doc['session_id']}.snapshot.json"
        assert snap.exists()
        assert json.loads(snap.read_text())["kind"] == "delphi_session"


class TestEngineApiParity:
    """The HTTP surface must mirror engine preconditions exactly."""

    SCENARIO = {
        "experts": ("a", "b", "c"),
        "samples": (1, 2),
        "round1": {"a": {1: 2, 2: 0}, "b": {1: 3, 2: 0}, "c": {1: 11, 2: 1}},
        "round2": {"a": {1: 5}, "b": {1: 5}, "c": {1: 6}},
    }

    def _run_engine(self):
        s = self.SCENARIO
        session = open_session(s["experts"], s["samples"], epsilon=2.0, max_rounds=5)
        for expert, totals in s["round1"].items():
            submit_scores(session, expert, 1,
                          [sheet(expert, k, v) for k, v in totals.items()])
        close_round(session, 1)
        for expert, totals in s["round2"].items():
            submit_scores(session, expert, 2,
                          [sheet(expert, k, v, round_index=2) for k, v in totals.items()])
        close_round(session, 2)
        return [(r.sample_id, r.label, r.forced) for r in session.export_labels()]

    def _run_http(self, tmp_path):
        s = self.SCENARIO
        client = make_client(tmp_path, "parity")
        doc = create_session(client, experts=s["experts"], samples=s["samples"])
        sid = doc["session_id"]
        for expert, totals in s["round1"].items():
            assert submit(client, doc, expert, totals).status_code == 200
        client.post(f"/v1/sessions/{sid}/rounds/1/close", headers=ADMIN)
        for expert, totals in s["round2"].items():
            assert submit(client, doc, expert, totals, round_index=2).status_code == 200
        client.post(f"/v1/sessions/{sid}/rounds/2/close", headers=ADMIN)
        rows = client.get(f"/v1/sessions/{sid}/labels", headers=ADMIN).text.splitlines()[1:]
        return [(int(a), int(b), c == "true")
                for a, b, c in (row.split(",") for row in rows)]

    def test_same_scenario_same_labels(self, tmp_path):
        assert self._run_engine() == self._run_http(tmp_path)
