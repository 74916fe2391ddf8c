import numpy as np
import pytest

from prefstudy.ahp import SaatyGrade, ev_priorities, matrix_from_judgments
from prefstudy.sessions import (
    ProtocolError,
    SessionStore,
    UnknownSessionError,
    schedule_pairs,
    transitivity_violations,
)
from prefstudy.study import Factor, StudyDesign


@pytest.fixture()
def store(demo_design):
    return SessionStore(demo_design)


def answer_all(store, session, grade_fn=None):
    while session.current_pair() is not None:
        pair = session.current_pair()
        grade = grade_fn(pair) if grade_fn else SaatyGrade(1, "none")
        store.submit_judgment(session.session_id, pair, grade)
    return session


def test_schedule_covers_every_pair_once(demo_design):
    pairs = schedule_pairs(9, seed=42)
    assert len(pairs) == 36
    assert len(set(pairs)) == 36
    assert all(i < j for i, j in pairs)


def test_schedule_deterministic_by_seed(store):
    s1 = store.create_session(seed=7)
    s2 = store.create_session(seed=7)
    s3 = store.create_session(seed=8)
    assert s1.pair_order == s2.pair_order
    assert s1.pair_order != s3.pair_order


def test_two_item_study_has_one_pair():
    design = StudyDesign.full_factorial([Factor("A", ("x", "y"))])
    store = SessionStore(design)
    session = store.create_session()
    assert session.total_pairs == 1


def test_all_indifferent_gives_uniform_weights(store):
    session = answer_all(store, store.create_session(seed=3))
    assert session.state == "awaiting_review"
    assert session.weights == pytest.approx(np.full(9, 1 / 9), abs=1e-12)
    assert session.consistency.cr == pytest.approx(0.0, abs=1e-12)


def test_final_submission_reports_weights(store):
    session = store.create_session(seed=5)
    for _ in range(35):
        store.submit_judgment(session.session_id, session.current_pair(), SaatyGrade(1, "none"))
        assert session.weights is None
    store.submit_judgment(session.session_id, session.current_pair(), SaatyGrade(1, "none"))
    assert session.weights is not None
    assert session.state == "awaiting_review"


def test_out_of_order_submission_rejected(store):
    session = store.create_session(seed=1)
    wrong = session.pair_order[5]
    with pytest.raises(ProtocolError) as err:
        store.submit_judgment(session.session_id, wrong, SaatyGrade(1, "none"))
    assert err.value.code == "out_of_order"


def test_duplicate_submission_rejected(store):
    session = store.create_session(seed=1)
    first = session.current_pair()
    store.submit_judgment(session.session_id, first, SaatyGrade(3, "left"))
    with pytest.raises(ProtocolError) as err:
        store.submit_judgment(session.session_id, first, SaatyGrade(3, "left"))
    assert err.value.code in ("duplicate", "out_of_order")


def test_weights_match_direct_recomputation(store, demo_design):
    rng = np.random.default_rng(11)

    def grade_fn(pair):
        intensity = int(rng.integers(1, 10))
        if intensity == 1:
            return SaatyGrade(1, "none")
        return SaatyGrade(intensity, "left" if rng.random() < 0.5 else "right")

    session = answer_all(store, store.create_session(seed=13), grade_fn)
    matrix = matrix_from_judgments(
        demo_design.n_items, [(i, j, g) for (i, j), g in session.judgments.items()]
    )
    weights, report = ev_priorities(matrix)
    assert session.weights == pytest.approx(weights.weights, abs=0)  # bit-for-bit
    assert session.consistency.cr == report.cr


def test_review_accept_completes_even_above_guideline(store):
    def strong(pair):
        return SaatyGrade(9, "left" if sum(pair) % 2 else "right")

    session = answer_all(store, store.create_session(seed=2), strong)
    assert session.state == "awaiting_review"
    store.review(session.session_id, "accept")
    assert session.state == "complete"


def test_review_revise_reopens_pairs_and_recomputes(store):
    session = answer_all(store, store.create_session(seed=4))
    cr_before = session.consistency.cr
    targets = [session.pair_order[10], session.pair_order[3]]
    store.review(session.session_id, "revise", targets)
    assert session.state == "revising"
    assert session.answered == 34
    # reopened pairs come back in schedule order
    assert session.current_pair() == session.pair_order[3]
    store.submit_judgment(session.session_id, session.pair_order[3], SaatyGrade(9, "left"))
    store.submit_judgment(session.session_id, session.pair_order[10], SaatyGrade(9, "left"))
    assert session.state == "awaiting_review"
    assert session.consistency.cr != pytest.approx(cr_before, abs=1e-12)


def test_review_empty_revision_is_noop(store):
    session = answer_all(store, store.create_session(seed=6))
    store.review(session.session_id, "revise", [])
    assert session.state == "awaiting_review"


def test_review_wrong_state_rejected(store):
    session = store.create_session(seed=1)
    with pytest.raises(ProtocolError):
        store.review(session.session_id, "accept")


def test_state_machine_random_walk(store):
    # random command sequences never reach an undeclared transition
    rng = np.random.default_rng(0)
    for trial in range(20):
        session = store.create_session(seed=int(rng.integers(0, 1000)))
        history = [session.state]
        for _ in range(200):
            action = rng.choice(["judge", "accept", "revise"])
            try:
                if action == "judge":
                    pair = session.current_pair()
                    if pair is None:
                        continue
                    store.submit_judgment(session.session_id, pair, SaatyGrade(1, "none"))
                elif action == "accept":
                    store.review(session.session_id, "accept")
                else:
                    answered = list(session.judgments)
                    if not answered:
                        continue
                    store.review(session.session_id, "revise", [answered[0]])
            except ProtocolError:
                continue
            if session.state != history[-1]:
                history.append(session.state)
            if session.state == "complete":
                break
        allowed = {
            ("in_progress", "awaiting_review"),
            ("awaiting_review", "revising"),
            ("revising", "awaiting_review"),
            ("awaiting_review", "complete"),
        }
        for a, b in zip(history, history[1:]):
            assert (a, b) in allowed


def test_transitivity_violation_counter():
    # a > b, b > c, c > a is one strict 3-cycle
    judgments = {
        (0, 1): SaatyGrade(3, "left"),
        (1, 2): SaatyGrade(3, "left"),
        (0, 2): SaatyGrade(3, "right"),
    }
    assert transitivity_violations(judgments, 3) == 1
    judgments[(0, 2)] = SaatyGrade(3, "left")
    assert transitivity_violations(judgments, 3) == 0


def test_unknown_session(store):
    with pytest.raises(UnknownSessionError):
        store.get("nope")


def test_export_round_trip(store, demo_design):
    from prefstudy import formats

    session = answer_all(store, store.create_session(seed=21))
    store.review(session.session_id, "accept")
    judgments_csv, weights_csv, exported, skipped = store.export()
    assert exported == [session.session_id]
    judgments, diags = formats.parse_judgments(judgments_csv, demo_design)
    assert diags == []
    rows = formats.parse_weights(weights_csv, demo_design)
    # re-running prioritization on the exported judgments reproduces the weights
    matrix = matrix_from_judgments(9, judgments[session.session_id])
    weights, _ = ev_priorities(matrix)
    assert rows[0][1] == pytest.approx(weights.weights, abs=1e-12)


def test_export_incomplete_requires_partial(store):
    store.create_session(seed=1)
    with pytest.raises(ProtocolError):
        store.export()
    judgments_csv, weights_csv, exported, skipped = store.export(partial=True)
    assert exported == []
    assert len(skipped) == 1
    # empty but valid files with headers
    assert judgments_csv.splitlines()[0] == "subject_id,left,right,intensity,favored"
    assert weights_csv.splitlines()[0] == "subject_id,profile,weight,cr"


def test_persistence_replay(tmp_path, demo_design):
    store = SessionStore(demo_design, store_dir=tmp_path)
    session = store.create_session(seed=17)
    for _ in range(10):
        store.submit_judgment(session.session_id, session.current_pair(), SaatyGrade(5, "left"))
    # a fresh store replays the event log to the same state
    replayed = SessionStore(demo_design, store_dir=tmp_path).get(session.session_id)
    assert replayed.state == "in_progress"
    assert replayed.answered == 10
    assert replayed.pair_order == session.pair_order
    assert replayed.judgments == session.judgments


def test_persistence_replay_complete(tmp_path, demo_design):
    store = SessionStore(demo_design, store_dir=tmp_path)
    session = store.create_session(seed=19)
    answer_all(store, session)
    store.review(session.session_id, "revise", [session.pair_order[0]])
    store.submit_judgment(session.session_id, session.pair_order[0], SaatyGrade(7, "right"))
    store.review(session.session_id, "accept")
    replayed = SessionStore(demo_design, store_dir=tmp_path).get(session.session_id)
    assert replayed.state == "complete"
    assert replayed.weights == pytest.approx(session.weights, abs=0)


def test_concurrent_sessions_are_isolated(store):
    import threading

    sessions = [store.create_session(seed=100 + k) for k in range(4)]
    errors = []

    def run(session):
        try:
            answer_all(store, session)
            store.review(session.session_id, "accept")
        except Exception as exc:  # pragma: no cover - failure path
            errors.append(exc)

    threads = [threading.Thread(target=run, args=(s,)) for s in sessions]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert errors == []
    assert all(s.state == "complete" for s in sessions)
    judgments_csv, weights_csv, exported, _ = store.export()
    assert len(exported) == 4
