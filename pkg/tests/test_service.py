import pytest
from fastapi.testclient import TestClient

from prefstudy.service import create_app
from prefstudy.sessions import SessionStore


@pytest.fixture()
def client(demo_design):
    store = SessionStore(demo_design)
    return TestClient(create_app(store))


def create_session(client, seed=11):
    res = client.post("/sessions", json={"respondent": {"age": 23}, "seed": seed})
    assert res.status_code == 201
    return res.json()


def answer_everything(client, sid, cell=4):
    intensity, favored = 1, "none"
    if cell != 4:
        from prefstudy.ahp import BIPOLAR_SCALE

        intensity, favored = BIPOLAR_SCALE[cell]
    last = None
    while True:
        nxt = client.get(f"/sessions/{sid}/next").json()
        if nxt["pair"] is None:
            break
        res = client.post(
            f"/sessions/{sid}/judgments",
            json={"pair_index": nxt["pair"]["pair_index"], "intensity": intensity, "favored": favored},
        )
        assert res.status_code == 200, res.text
        last = res.json()
    return last


def test_study_endpoint_exposes_scale(client):
    doc = client.get("/study").json()
    assert len(doc["profiles"]) == 9
    assert len(doc["scale"]) == 9
    assert doc["scale"][4] == {"position": 4, "intensity": 1, "favored": "none"}


def test_create_and_walk_through(client):
    created = create_session(client)
    sid = created["session_id"]
    assert created["total_pairs"] == 36
    final = answer_everything(client, sid)
    assert final["state"] == "awaiting_review"
    assert final["cr"] == pytest.approx(0.0, abs=1e-12)
    assert len(final["weights"]) == 9
    status = client.get(f"/sessions/{sid}/status").json()
    assert status["state"] == "awaiting_review"
    assert "inconsistent_pairs" in status


def test_progress_and_transitivity_fields(client):
    sid = create_session(client)["session_id"]
    nxt = client.get(f"/sessions/{sid}/next").json()
    assert nxt["progress"] == {"answered": 0, "total": 36}
    res = client.post(
        f"/sessions/{sid}/judgments",
        json={"pair_index": 0, "intensity": 5, "favored": "left"},
    ).json()
    assert res["answered"] == 1
    assert "transitivity_violations" in res


def test_out_of_order_rejected(client):
    sid = create_session(client)["session_id"]
    res = client.post(
        f"/sessions/{sid}/judgments",
        json={"pair_index": 3, "intensity": 1, "favored": "none"},
    )
    assert res.status_code == 409
    body = res.json()
    assert body["code"] == "out_of_order"
    assert "message" in body


def test_bad_grade_rejected(client):
    sid = create_session(client)["session_id"]
    res = client.post(
        f"/sessions/{sid}/judgments",
        json={"pair_index": 0, "intensity": 4, "favored": "none"},
    )
    assert res.status_code == 422
    assert res.json()["code"] == "bad_grade"


def test_unknown_session_404(client):
    assert client.get("/sessions/missing/status").status_code == 404


def test_review_accept_flow(client):
    sid = create_session(client)["session_id"]
    answer_everything(client, sid)
    res = client.post(f"/sessions/{sid}/review", json={"decision": "accept"})
    assert res.status_code == 200
    assert res.json()["state"] == "complete"


def test_review_revise_recomputes_cr(client):
    sid = create_session(client, seed=23)["session_id"]
    answer_everything(client, sid)
    status = client.get(f"/sessions/{sid}/status").json()
    first = status["weights"]
    # revise one pair to a strong preference and check the results change
    nxt_pair = None
    res = client.post(
        f"/sessions/{sid}/review",
        json={"decision": "revise", "pairs": [[0, 1]]},
    )
    assert res.status_code == 200
    assert res.json()["state"] == "revising"
    nxt = client.get(f"/sessions/{sid}/next").json()
    assert nxt["pair"] is not None
    res = client.post(
        f"/sessions/{sid}/judgments",
        json={"pair_index": nxt["pair"]["pair_index"], "intensity": 9, "favored": "left"},
    ).json()
    assert res["state"] == "awaiting_review"
    assert res["weights"] != first
    assert res["cr"] > 0.0


def test_review_wrong_state_conflict(client):
    sid = create_session(client)["session_id"]
    res = client.post(f"/sessions/{sid}/review", json={"decision": "accept"})
    assert res.status_code == 409


def test_export_endpoint_round_trip(client, demo_design):
    from prefstudy import formats

    sid = create_session(client, seed=31)["session_id"]
    answer_everything(client, sid)
    client.post(f"/sessions/{sid}/review", json={"decision": "accept"})
    doc = client.get("/export").json()
    assert doc["sessions"] == [sid]
    judgments, diags = formats.parse_judgments(doc["judgments_csv"], demo_design)
    assert diags == []
    assert len(judgments[sid]) == 36


def test_export_incomplete_conflict_and_partial(client):
    create_session(client)
    res = client.get("/export")
    assert res.status_code == 409
    res = client.get("/export", params={"partial": "true"})
    assert res.status_code == 200
    assert res.json()["sessions"] == []
