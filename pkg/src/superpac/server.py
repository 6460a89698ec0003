"""HTTP session service exposing the active loop to a human labeler.

Each session runs the clustering loop on a worker thread; the oracle call is
the suspension point. When the loop asks about a pair, the question becomes
the session's single pending query, served by ``GET /sessions/{id}/next``
until ``POST /sessions/{id}/answers`` resumes the loop. All state is an
append-only JSON-lines event log per session, so a restarted server rebuilds
a session by replaying its recorded answers through the (deterministic) loop.
"""
from __future__ import annotations

import base64
import json
import threading
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse

from . import active, cli
from .evaluation import misclassification_rate

WAIT_TIMEOUT = 120.0  # seconds to wait for the loop to produce the next query


class ChannelOracle:
    """Oracle that parks the loop thread until an answer is submitted.

    ``replay`` answers are consumed first (without blocking) so a session can
    be reconstructed from its event log after a restart.
    """

    def __init__(self, session: "Session", replay):
        self.session = session
        self.replay = list(replay)
        self.asked = 0

    def answer(self, i: int, j: int) -> bool:
        s = self.session
        query_id = f"q{self.asked}"
        self.asked += 1
        if self.replay:
            ri, rj, ans = self.replay.pop(0)
            if {ri, rj} != {i, j}:
                raise RuntimeError(
                    f"event log mismatch: recorded ({ri},{rj}), loop asked ({i},{j})"
                )
            return bool(ans)
        with s.cond:
            s.pending = {"query_id": query_id, "i": int(i), "j": int(j)}
            s.answer = None
            s.cond.notify_all()
            while s.answer is None and not s.abort:
                s.cond.wait(1.0)
            if s.abort:
                raise RuntimeError("session aborted")
            ans = s.answer
            s.pending = None
            s.answer = None
            return bool(ans)


class Session:
    def __init__(self, session_id: str, config: dict, log_path: Path):
        self.id = session_id
        self.config = config
        self.log_path = log_path
        self.cond = threading.Condition()
        self.phase = "exploring"
        self.pending = None
        self.answer = None
        self.abort = False
        self.error_msg = None
        self.trace = active.RunTrace()
        self.query_log = active.QueryLog()
        self.certain_sets = None
        self.labeling = None
        self.X = None
        self.thread = None

    # -- worker ------------------------------------------------------------

    def start(self, replay):
        self.X = cli.load_dataset(self.config)
        K = int(self.config.get("K") or self.config["dataset"]["synthetic"]["K"])
        d = int(self.config.get("d") or self.config["dataset"]["synthetic"]["d"])
        A = cli.resolve_affinity(self.config, self.X, K)
        budget = int(self.config.get("budget", 0))
        seed = int(self.config.get("seed", 0))
        smoothing = self.config.get("strategy") == "superpac-s"
        oracle = ChannelOracle(self, replay)

        def observer(event, trace=None, labeling=None, log=None, Z=None):
            with self.cond:
                if event in ("exploring", "querying"):
                    self.phase = event
                if trace is not None:
                    self.trace = trace
                if log is not None:
                    self.query_log = log
                if Z is not None:
                    self.certain_sets = Z
                if labeling is not None:
                    self.labeling = labeling
                self.cond.notify_all()

        def work():
            try:
                trace = active.active_clustering(
                    self.X, K, d, A, budget, oracle, seed,
                    options=active.LoopOptions(smoothing=smoothing),
                    observer=observer,
                )
                with self.cond:
                    self.trace = trace
                    self.phase = "done"
                    self.pending = None
                    self.cond.notify_all()
            except Exception as e:  # surfaced through /state
                with self.cond:
                    self.error_msg = str(e)
                    self.phase = "error"
                    self.pending = None
                    self.cond.notify_all()

        self.thread = threading.Thread(target=work, daemon=True)
        self.thread.start()

    def wait_ready(self):
        """Block until there is a pending query or the session finished."""
        with self.cond:
            deadline = WAIT_TIMEOUT
            while self.pending is None and self.phase not in ("done", "error"):
                if not self.cond.wait(0.05):
                    deadline -= 0.05
                    if deadline <= 0:
                        raise HTTPException(503, "session is busy")

    # -- event log ---------------------------------------------------------

    def record_event(self, event: dict) -> None:
        with open(self.log_path, "a") as f:
            f.write(json.dumps(event) + "\n")


class SessionManager:
    def __init__(self, sessions_dir):
        self.dir = Path(sessions_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()

    def create(self, config: dict) -> Session:
        session_id = uuid.uuid4().hex[:12]
        log_path = self.dir / f"{session_id}.jsonl"
        s = Session(session_id, config, log_path)
        s.record_event({"type": "created", "id": session_id, "config": config})
        try:
            s.start(replay=[])
        except Exception:
            log_path.unlink(missing_ok=True)
            raise
        with self.lock:
            self.sessions[session_id] = s
        return s

    def get(self, session_id: str) -> Session:
        with self.lock:
            s = self.sessions.get(session_id)
        if s is not None:
            return s
        return self._resume(session_id)

    def _resume(self, session_id: str) -> Session:
        log_path = self.dir / f"{session_id}.jsonl"
        if not log_path.exists():
            raise HTTPException(404, f"unknown session {session_id}")
        config = None
        replay = []
        with open(log_path) as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                ev = json.loads(line)
                if ev["type"] == "created":
                    config = ev["config"]
                elif ev["type"] == "answered":
                    replay.append((ev["i"], ev["j"], ev["must_link"]))
        if config is None:
            raise HTTPException(500, f"corrupt event log for session {session_id}")
        s = Session(session_id, config, log_path)
        s.start(replay)
        with self.lock:
            self.sessions[session_id] = s
        return s


def _image_payload(X, idx: int):
    """Min-max scaled uint8 pixels of one point, base64 encoded."""
    col = X.points[:, idx]
    lo, hi = float(col.min()), float(col.max())
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    pixels = np.clip((col - lo) * scale, 0, 255).astype(np.uint8)
    return base64.b64encode(pixels.tobytes()).decode("ascii")


def create_app(sessions_dir="sessions") -> FastAPI:
    app = FastAPI(title="superpac labeling server")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    manager = SessionManager(sessions_dir)
    app.state.manager = manager

    @app.post("/sessions")
    def create_session(config: dict):
        try:
            session = manager.create(config)
        except (cli.ConfigError, cli.DataError) as e:
            raise HTTPException(400, str(e))
        session.wait_ready()
        return {"id": session.id}

    @app.get("/sessions/{session_id}/next")
    def next_query(session_id: str):
        s = manager.get(session_id)
        s.wait_ready()
        with s.cond:
            if s.phase == "error":
                raise HTTPException(500, s.error_msg or "session failed")
            if s.pending is None:
                return {
                    "done": True,
                    "final_labels": [int(v) for v in s.trace.final_labels],
                }
            payload = dict(s.pending)
        if s.X is not None and s.X.image_meta is not None:
            w, h, c = s.X.image_meta
            payload["image_meta"] = {"width": w, "height": h, "channels": c}
            payload["image_i"] = _image_payload(s.X, payload["i"])
            payload["image_j"] = _image_payload(s.X, payload["j"])
        elif s.X is not None:
            # raw feature vectors so a client can draw a heat-strip fallback
            payload["vector_i"] = [float(v) for v in s.X.points[:, payload["i"]]]
            payload["vector_j"] = [float(v) for v in s.X.points[:, payload["j"]]]
        return payload

    @app.post("/sessions/{session_id}/answers")
    def submit_answer(session_id: str, body: dict):
        s = manager.get(session_id)
        query_id = body.get("query_id")
        must_link = body.get("must_link")
        if query_id is None or must_link is None:
            raise HTTPException(422, "body must contain query_id and must_link")
        with s.cond:
            if s.phase in ("done", "error"):
                return {"status": "rejected", "reason": "done"}
            if s.pending is None or s.pending["query_id"] != query_id:
                return {"status": "rejected", "reason": "stale"}
            i, j = s.pending["i"], s.pending["j"]
            s.record_event(
                {"type": "answered", "query_id": query_id,
                 "i": i, "j": j, "must_link": bool(must_link)}
            )
            s.answer = bool(must_link)
            s.cond.notify_all()
            # wait until the loop thread consumes the answer, so a subsequent
            # poll cannot observe the already-answered query as still pending
            deadline = WAIT_TIMEOUT
            while s.answer is not None and s.phase not in ("done", "error"):
                if not s.cond.wait(0.05):
                    deadline -= 0.05
                    if deadline <= 0:
                        raise HTTPException(503, "session is busy")
        s.wait_ready()
        return {"status": "accepted"}

    @app.get("/sessions/{session_id}/state")
    def session_state(session_id: str):
        s = manager.get(session_id)
        with s.cond:
            state = {
                "phase": s.phase,
                "queries_used": s.query_log.count,
                "n_certain_sets": s.certain_sets.n_sets if s.certain_sets else 0,
                "current_labels": (
                    [int(v) for v in s.labeling.labels] if s.labeling else None
                ),
            }
            if s.phase == "error":
                state["detail"] = s.error_msg
            if s.labeling is not None and s.X is not None and s.X.truth is not None:
                state["error"] = misclassification_rate(
                    s.labeling, s.X.truth
                ).misclassification_rate
        return state

    @app.get("/sessions/{session_id}/trace")
    def session_trace(session_id: str):
        s = manager.get(session_id)
        lines = ["queries,error,cost"]
        with s.cond:
            for r in s.trace.records:
                err = "" if r.error is None else f"{r.error:.10g}"
                lines.append(f"{r.queries_used},{err},{r.cost:.10g}")
        return PlainTextResponse("\n".join(lines) + "\n", media_type="text/csv")

    return app
