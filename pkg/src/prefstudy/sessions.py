"""Live questionnaire sessions: randomized pair schedule, judgment capture,
consistency review and the revision loop.

State machine::

    in_progress -> awaiting_review -> (revising -> awaiting_review)* -> complete

Sessions persist as append-only JSON-lines event logs (one file per session)
and are rebuilt by replay, so a restarted service resumes exactly where it
stopped. All mutating calls on one session are serialized by a per-session
lock; reads return snapshots.
"""

import itertools
import json
import random
import threading
import uuid
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ahp import ConsistencyReport, SaatyGrade, ev_priorities, matrix_from_judgments
from .study import StudyDesign, SubjectRecord

STATES = ("in_progress", "awaiting_review", "revising", "complete")


class ProtocolError(Exception):
    """Operation not allowed in the session's current state."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class UnknownSessionError(KeyError):
    pass


@dataclass
class Session:
    session_id: str
    design: StudyDesign
    respondent: dict
    seed: int
    pair_order: list[tuple[int, int]]
    judgments: dict[tuple[int, int], SaatyGrade] = field(default_factory=dict)
    state: str = "in_progress"
    cursor: int = 0  # next index into pair_order while in_progress
    revision_queue: list[tuple[int, int]] = field(default_factory=list)
    weights: np.ndarray | None = None
    consistency: ConsistencyReport | None = None

    @property
    def total_pairs(self) -> int:
        return len(self.pair_order)

    @property
    def answered(self) -> int:
        return len(self.judgments)

    def current_pair(self) -> tuple[int, int] | None:
        if self.state == "in_progress":
            return self.pair_order[self.cursor] if self.cursor < self.total_pairs else None
        if self.state == "revising":
            return self.revision_queue[0] if self.revision_queue else None
        return None


def schedule_pairs(n_items: int, seed: int) -> list[tuple[int, int]]:
    """Deterministic random permutation of all unordered item pairs."""
    pairs = list(itertools.combinations(range(n_items), 2))
    random.Random(seed).shuffle(pairs)
    return pairs


def transitivity_violations(judgments: dict, n_items: int) -> int:
    """Count judged triples forming a strict preference cycle."""

    def relation(i, j):
        grade = judgments.get((min(i, j), max(i, j)))
        if grade is None:
            return None
        if grade.favored == "none":
            return 0
        favored_left = grade.favored == "left"
        if i < j:
            return 1 if favored_left else -1
        return -1 if favored_left else 1

    count = 0
    for a, b, c in itertools.combinations(range(n_items), 3):
        ab, bc, ca = relation(a, b), relation(b, c), relation(c, a)
        if None in (ab, bc, ca):
            continue
        if ab == bc == ca and ab != 0:
            count += 1
    return count


def inconsistent_pairs(session: Session, top: int = 3) -> list[dict]:
    """Judged pairs whose ratio departs most from the fitted weights."""
    if session.weights is None:
        return []
    w = session.weights
    scored = []
    for (i, j), grade in session.judgments.items():
        a_ij = float(grade.intensity) if grade.favored == "left" else (
            1.0 if grade.favored == "none" else 1.0 / grade.intensity
        )
        scored.append(((i, j), abs(np.log(a_ij * w[j] / w[i]))))
    scored.sort(key=lambda t: (-t[1], t[0]))
    labels = session.design.labels
    return [
        {"left": labels[i], "right": labels[j], "misfit": round(score, 6)}
        for (i, j), score in scored[:top]
    ]


class SessionStore:
    """Owns sessions for one study; persists them as JSONL event logs."""

    def __init__(
        self,
        design: StudyDesign,
        store_dir=None,
        default_seed: int | None = None,
        transitivity_hints: bool = True,
        assets: dict | None = None,
    ):
        self.design = design
        self.store_dir = Path(store_dir) if store_dir else None
        self.default_seed = default_seed
        self.transitivity_hints = transitivity_hints
        self.assets = assets or {}
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        if self.store_dir is not None:
            self.store_dir.mkdir(parents=True, exist_ok=True)
            self._replay_all()

    # -- persistence -----------------------------------------------------

    def _log_path(self, session_id: str) -> Path:
        return self.store_dir / f"{session_id}.jsonl"

    def _append_event(self, session_id: str, event: dict) -> None:
        if self.store_dir is None:
            return
        with self._log_path(session_id).open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")

    def _replay_all(self) -> None:
        for path in sorted(self.store_dir.glob("*.jsonl")):
            session = None
            for line in path.read_text(encoding="utf-8").splitlines():
                event = json.loads(line)
                session = self._apply_event(session, event)
            if session is not None:
                self._sessions[session.session_id] = session
                self._locks[session.session_id] = threading.Lock()

    def _apply_event(self, session, event):
        kind = event["event"]
        if kind == "created":
            return Session(
                session_id=event["session_id"],
                design=self.design,
                respondent=event.get("respondent", {}),
                seed=event["seed"],
                pair_order=schedule_pairs(self.design.n_items, event["seed"]),
            )
        if kind == "judgment":
            self._apply_judgment(session, tuple(event["pair"]), SaatyGrade(event["intensity"], event["favored"]))
            return session
        if kind == "review":
            self._apply_review(session, event["decision"], [tuple(p) for p in event.get("pairs", [])])
            return session
        raise ValueError(f"unknown event {kind!r}")

    # -- lifecycle ---------------------------------------------------------

    def create_session(self, respondent: dict | None = None, seed: int | None = None) -> Session:
        session_id = uuid.uuid4().hex
        if seed is None:
            seed = self.default_seed
        if seed is None:
            # deterministic per-respondent seed derived from the session id
            seed = zlib.crc32(session_id.encode("ascii"))
        session = Session(
            session_id=session_id,
            design=self.design,
            respondent=respondent or {},
            seed=int(seed),
            pair_order=schedule_pairs(self.design.n_items, int(seed)),
        )
        with self._registry_lock:
            self._sessions[session_id] = session
            self._locks[session_id] = threading.Lock()
        self._append_event(
            session_id,
            {"event": "created", "session_id": session_id, "seed": session.seed, "respondent": session.respondent},
        )
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(session_id) from None

    def lock(self, session_id: str) -> threading.Lock:
        return self._locks[session_id]

    def sessions(self) -> list[Session]:
        return sorted(self._sessions.values(), key=lambda s: s.session_id)

    # -- operations ---------------------------------------------------------

    def _finish_round(self, session: Session) -> None:
        matrix = matrix_from_judgments(
            self.design.n_items,
            [(i, j, grade) for (i, j), grade in session.judgments.items()],
        )
        priorities, report = ev_priorities(matrix)
        session.weights = priorities.weights
        session.consistency = report
        session.state = "awaiting_review"

    def _apply_judgment(self, session: Session, pair: tuple[int, int], grade: SaatyGrade) -> None:
        if session.state not in ("in_progress", "revising"):
            raise ProtocolError("wrong_state", f"cannot submit judgments in state {session.state!r}")
        expected = session.current_pair()
        if expected is None or tuple(pair) != expected:
            if tuple(pair) in session.judgments:
                raise ProtocolError("duplicate", f"pair {pair} was already answered")
            raise ProtocolError("out_of_order", f"expected pair {expected}, got {tuple(pair)}")
        session.judgments[tuple(pair)] = grade
        if session.state == "in_progress":
            session.cursor += 1
            if session.cursor >= session.total_pairs:
                self._finish_round(session)
        else:
            session.revision_queue.pop(0)
            if not session.revision_queue:
                self._finish_round(session)

    def submit_judgment(self, session_id: str, pair: tuple[int, int], grade: SaatyGrade) -> Session:
        session = self.get(session_id)
        with self.lock(session_id):
            self._apply_judgment(session, pair, grade)
            self._append_event(
                session_id,
                {
                    "event": "judgment",
                    "pair": list(pair),
                    "intensity": grade.intensity,
                    "favored": grade.favored,
                },
            )
        return session

    def _apply_review(self, session: Session, decision: str, pairs) -> None:
        if session.state != "awaiting_review":
            raise ProtocolError("wrong_state", f"cannot review in state {session.state!r}")
        if decision == "accept":
            session.state = "complete"
            return
        if decision != "revise":
            raise ProtocolError("bad_decision", f"decision must be accept or revise, got {decision!r}")
        normalized = []
        for i, j in pairs:
            key = (min(i, j), max(i, j))
            if key not in session.judgments:
                raise ProtocolError("unknown_pair", f"pair {key} was never answered")
            if key not in normalized:
                normalized.append(key)
        if not normalized:
            return  # revising nothing is a no-op
        # reopen in original schedule order for a stable replay sequence
        normalized.sort(key=lambda p: session.pair_order.index(p))
        for key in normalized:
            del session.judgments[key]
        session.revision_queue = normalized
        session.weights = None
        session.consistency = None
        session.state = "revising"

    def review(self, session_id: str, decision: str, pairs=()) -> Session:
        session = self.get(session_id)
        with self.lock(session_id):
            self._apply_review(session, decision, pairs)
            self._append_event(
                session_id,
                {"event": "review", "decision": decision, "pairs": [list(p) for p in pairs]},
            )
        return session

    # -- export ---------------------------------------------------------------

    def export(self, partial: bool = False):
        """Judgments and weights files for completed sessions.

        Returns ``(judgments_csv, weights_csv, exported_ids, skipped_ids)``.
        Incomplete sessions raise unless ``partial`` is set, in which case
        they are skipped and listed.
        """
        from . import formats
        from .ahp import PriorityVector

        exported, skipped, rows, records = [], [], [], []
        labels = self.design.labels
        for session in self.sessions():
            if session.state != "complete":
                if not partial:
                    raise ProtocolError(
                        "incomplete_session",
                        f"session {session.session_id} is {session.state}; pass partial to skip it",
                    )
                skipped.append(session.session_id)
                continue
            exported.append(session.session_id)
            for i, j in session.pair_order:
                grade = session.judgments[(i, j)]
                rows.append((session.session_id, labels[i], labels[j], grade))
            records.append(
                SubjectRecord(
                    subject_id=session.session_id,
                    weights=PriorityVector(session.weights),
                    consistency=session.consistency,
                )
            )
        return (
            formats.dump_judgments(rows),
            formats.dump_weights(records, self.design),
            exported,
            skipped,
        )
