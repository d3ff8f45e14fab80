"""HTTP session service for live matching-pennies play.

The protocol enforces commit-reveal fairness: each round the machine draws a
prediction and stores it server-side (commit), and only after the player's
outcome is recorded does the response unveil it (reveal).  Forecasts use
single-playout mode with per-round derived seeds, so a finished session's
transcript replays byte-identically from (phi spec, seed, outcome stream).
"""
from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request

from ..core import PotentialFunction, Transcript
from ..predictors import PlayoutConfig, draw
from .runner import forecast_for, transcript_summary
from .specs import ConfigError, build_phi

SESSION_TTL = 3600.0  # seconds idle before a session expires

_DEFAULT_MAX_PERIOD = 4


def default_phi_spec(n: int, max_period: int = _DEFAULT_MAX_PERIOD) -> dict:
    penalty = {"mode": "exhaustive"} if n <= 20 else {"mode": "mc", "m": 2000, "seed": 0}
    return {"kind": "finite_set",
            "pattern": {"n": n, "max_period": min(max_period, n)},
            "penalty": penalty}


@dataclass
class _Session:
    id: str
    phi: PotentialFunction
    seed: int
    transcript: Transcript
    t: int = 1
    pending: dict | None = None          # {"token":…, "prediction":…, "q":…}
    machine_score: int = 0
    last_access: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)
    persist_path: Path | None = None

    @property
    def n(self) -> int:
        return self.phi.n

    @property
    def done(self) -> bool:
        return self.t > self.n

    def view(self) -> dict:
        played = self.t - 1
        cum = 0
        history = []
        for r in self.transcript.rounds:
            cum += r.mistake
            history.append({"t": r.t, "q": r.q, "prediction": r.prediction,
                            "outcome": r.outcome, "cum_mistakes": cum})
        return {
            "id": self.id,
            "n": self.n,
            "round": min(self.t, self.n),
            "rounds_left": self.n - played,
            "machine_score": self.machine_score,
            "machine_win_rate": self.machine_score / played if played else 0.0,
            "done": self.done,
            "committed": self.pending is not None,
            "history": history,
        }


class SessionStore:
    """Thread-safe in-memory store with lazy idle expiry."""

    def __init__(self, ttl: float = SESSION_TTL):
        self.ttl = ttl
        self._sessions: dict[str, _Session] = {}
        self._lock = threading.Lock()

    def _purge(self, now: float):
        dead = [sid for sid, s in self._sessions.items()
                if now - s.last_access > self.ttl]
        for sid in dead:
            del self._sessions[sid]

    def add(self, session: _Session):
        with self._lock:
            self._purge(time.monotonic())
            self._sessions[session.id] = session

    def get(self, sid: str) -> _Session:
        now = time.monotonic()
        with self._lock:
            self._purge(now)
            s = self._sessions.get(sid)
            if s is None:
                raise HTTPException(404, detail=f"unknown session {sid!r}")
            s.last_access = now
            return s


def create_app(
    cors_origins: list[str] | None = None,
    static_dir: str | None = None,
    persist_dir: str | None = None,
    ttl: float = SESSION_TTL,
) -> FastAPI:
    app = FastAPI(title="seqpred game service")
    store = SessionStore(ttl)
    app.state.store = store

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(CORSMiddleware, allow_origins=list(cors_origins),
                           allow_methods=["*"], allow_headers=["*"])

    async def _body(request: Request) -> dict:
        raw = await request.body()
        if not raw:
            return {}
        try:
            data = json.loads(raw)
        except json.JSONDecodeError:
            raise HTTPException(422, detail="body is not valid JSON") from None
        if not isinstance(data, dict):
            raise HTTPException(422, detail="body must be a JSON object")
        return data

    @app.post("/api/sessions", status_code=201)
    async def create_session(request: Request):
        body = await _body(request)
        spec = body.get("phi")
        n = body.get("n")
        if spec is None:
            if n is None:
                raise HTTPException(422, detail="need 'phi' or 'n'")
            spec = default_phi_spec(int(n), int(body.get("max_period", _DEFAULT_MAX_PERIOD)))
        try:
            phi = build_phi(spec)
        except ConfigError as exc:
            raise HTTPException(422, detail=str(exc)) from None
        if n is not None and int(n) != phi.n:
            raise HTTPException(422, detail=f"horizon {n} does not match the potential's n={phi.n}")
        if phi.k != 2 or phi.covariate:
            raise HTTPException(422, detail="the game service plays binary sequence potentials only")
        seed = int(body.get("seed", secrets.randbits(62)))
        sid = secrets.token_hex(12)
        sess = _Session(sid, phi, seed, Transcript(seed))
        if persist_dir:
            root = Path(persist_dir)
            root.mkdir(parents=True, exist_ok=True)
            sess.persist_path = root / f"{sid}.jsonl"
        store.add(sess)
        return sess.view()

    @app.get("/api/sessions/{sid}")
    def get_session(sid: str):
        return store.get(sid).view()

    @app.post("/api/sessions/{sid}/commit")
    async def commit(sid: str, request: Request):
        body = await _body(request)
        token = body.get("token")
        sess = store.get(sid)
        with sess.lock:
            if sess.done:
                raise HTTPException(410, detail="horizon exhausted")
            if sess.pending is not None:
                if token is not None and token == sess.pending["token"]:
                    return {"ack": token, "round": sess.t}
                raise HTTPException(409, detail="round already committed")
            cfg = PlayoutConfig("single_playout", seed=sess.seed)
            prefix = [r.outcome for r in sess.transcript.rounds]
            f = forecast_for(sess.phi, prefix, cfg)
            pred = draw(f, sess.seed, sess.t)
            ack = token if token is not None else secrets.token_hex(8)
            sess.pending = {"token": ack, "prediction": pred, "forecast": f}
            return {"ack": ack, "round": sess.t}

    @app.post("/api/sessions/{sid}/reveal")
    async def reveal(sid: str, request: Request):
        body = await _body(request)
        outcome = body.get("outcome")
        if outcome not in (-1, 1):
            raise HTTPException(422, detail=f"outcome must be -1 or +1, got {outcome!r}")
        sess = store.get(sid)
        with sess.lock:
            if sess.pending is None:
                raise HTTPException(409, detail="no pending commit for this round")
            t = sess.t
            pred = sess.pending["prediction"]
            rec = sess.transcript.append(t, sess.pending["forecast"], pred, outcome)
            sess.pending = None
            sess.t += 1
            correct = rec.mistake == 0
            sess.machine_score += int(correct)
            if sess.persist_path is not None:
                line = json.dumps({"t": t, "q": rec.q, "prediction": pred,
                                   "outcome": outcome,
                                   "cum_mistakes": sess.transcript.cum_mistakes})
                with sess.persist_path.open("a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
                if sess.done:
                    with sess.persist_path.open("a", encoding="utf-8") as fh:
                        fh.write(json.dumps(transcript_summary(sess.phi, sess.transcript)) + "\n")
            return {
                "round": t,
                "prediction": pred,
                "outcome": outcome,
                "machine_correct": correct,
                "machine_win_rate": sess.machine_score / t,
                "rounds_left": sess.n - t,
            }

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
