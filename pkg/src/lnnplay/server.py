"""Session-oriented HTTP service for playing and inspecting games.

JSON request/response over a small in-memory session store. Each session
owns a game, a tracker, and a compiled logic graph; stepping a session is
serialized per session (concurrent steps answer 409 busy) while distinct
sessions proceed independently. An optional server-sent-event stream
mirrors step payloads for clients that want push updates; polling clients
lose nothing.

Error payloads are {"error": {"code", "message"}} with stable codes:
unknown_game, unknown_rulebook, unknown_session, unknown_run, session_done,
busy, bad_request.
"""

from __future__ import annotations

import asyncio
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from . import agents, game, parsing
from .rules import BUILTIN_RULEBOOKS, builtin, compile_rulebook

SESSION_TTL_SECONDS = 3600.0

GAMES = {
    "coin_collector": {
        "id": "coin_collector",
        "name": "Coin Collector",
        "rulebooks": list(BUILTIN_RULEBOOKS),
        "layouts": ["fix_a", "generated"],
    }
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _error_response(exc: ApiError) -> JSONResponse:
    return JSONResponse(
        status_code=exc.status,
        content={"error": {"code": exc.code, "message": exc.message}},
    )


@dataclass
class Session:
    id: str
    game_id: str
    rulebook_name: str
    state: game.GameState
    tracker: parsing.Tracker
    graph: object
    config: agents.AgentConfig
    facts: frozenset
    observation: str
    recommendations: list
    history: list = field(default_factory=list)
    created: float = field(default_factory=time.monotonic)
    last_access: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)
    listeners: list = field(default_factory=list)


class SessionStore:
    """In-memory sessions with lazy idle expiry."""

    def __init__(self, ttl: float = SESSION_TTL_SECONDS):
        self.ttl = ttl
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def put(self, session: Session) -> None:
        with self._lock:
            self._purge()
            self._sessions[session.id] = session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._purge()
            session = self._sessions.get(session_id)
            if session is None:
                raise ApiError(404, "unknown_session", f"no session {session_id!r}")
            session.last_access = time.monotonic()
            return session

    def _purge(self) -> None:
        now = time.monotonic()
        dead = [sid for sid, s in self._sessions.items()
                if now - s.last_access > self.ttl]
        for sid in dead:
            del self._sessions[sid]


def _recommendations_json(recs) -> list[dict]:
    return [r.to_json() for r in recs]


def _step_payload(session: Session, obs: game.Observation) -> dict:
    return {
        "observation": obs.text,
        "reward": obs.reward,
        "score": obs.score,
        "done": obs.done,
        "recommendations": _recommendations_json(session.recommendations),
        "lnn": session.graph.snapshot(),
    }


def _build_layout(body: dict) -> game.Layout:
    layout = body.get("layout")
    if layout == "fix_a":
        return game.fix_a_layout()
    if isinstance(layout, dict):
        try:
            return game.Layout.from_json(layout)
        except (KeyError, ValueError) as exc:
            raise ApiError(400, "bad_request", f"bad layout: {exc}") from exc
    if layout is not None and layout != "generated":
        raise ApiError(400, "bad_request", f"unknown layout {layout!r}")
    try:
        return game.generate_layout(
            chain_length=int(body.get("chain_length", 3)),
            branches=int(body.get("branches", 0)),
            seed=int(body.get("seed", 0)),
        )
    except (game.LayoutError, ValueError) as exc:
        raise ApiError(400, "bad_request", str(exc)) from exc


def create_app(runs_dir: str | None = None, ui_dir: str | None = None,
               session_ttl: float = SESSION_TTL_SECONDS) -> FastAPI:
    app = FastAPI(title="lnnplay", docs_url=None, redoc_url=None)
    store = SessionStore(ttl=session_ttl)
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return _error_response(exc)

    @app.get("/api/games")
    def list_games():
        return {"games": list(GAMES.values())}

    @app.post("/api/sessions")
    async def create_session(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            raise ApiError(400, "bad_request", "body must be JSON") from None
        game_id = body.get("game", "coin_collector")
        if game_id not in GAMES:
            raise ApiError(404, "unknown_game", f"no game {game_id!r}")
        rulebook_name = body.get("rulebook", "avoid_revisit")
        if rulebook_name not in BUILTIN_RULEBOOKS:
            raise ApiError(404, "unknown_rulebook", f"no rulebook {rulebook_name!r}")
        layout = _build_layout(body)
        max_steps = int(body.get("max_steps", game.MAX_STEPS_DEFAULT))
        if max_steps < 1:
            raise ApiError(400, "bad_request", "max_steps must be >= 1")

        graph = compile_rulebook(builtin(rulebook_name))
        state, obs = game.new_game(layout, max_steps)
        tracker = parsing.Tracker.start(obs.text)
        facts = parsing.tracker_facts(tracker, parsing.parse_observation(obs.text))
        config = agents.AgentConfig()
        _, recs = agents.loa_decide(graph, facts, config)

        session = Session(
            id=uuid.uuid4().hex,
            game_id=game_id,
            rulebook_name=rulebook_name,
            state=state,
            tracker=tracker,
            graph=graph,
            config=config,
            facts=facts,
            observation=obs.text,
            recommendations=recs,
        )
        store.put(session)
        return {
            "id": session.id,
            "game": game_id,
            "rulebook": rulebook_name,
            "observation": obs.text,
            "score": state.score,
            "done": state.done,
            "facts": sorted(str(f) for f in facts),
            "recommendations": _recommendations_json(recs),
            "lnn": graph.snapshot(),
        }

    @app.post("/api/sessions/{session_id}/step")
    async def step_session(session_id: str, request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            raise ApiError(400, "bad_request", "body must be JSON") from None
        command_text = body.get("command")
        if not isinstance(command_text, str) or not command_text.strip():
            raise ApiError(400, "bad_request", "missing command")
        session = store.get(session_id)
        if not session.lock.acquire(blocking=False):
            raise ApiError(409, "busy", "a step is already in flight")
        try:
            if session.state.done:
                raise ApiError(409, "session_done", "session is finished")
            command = game.parse_command(command_text)
            session.state, obs = game.step(session.state, command)
            session.tracker = parsing.update_tracker(session.tracker, command, obs.text)
            if parsing.parse_room_header(obs.text) is not None:
                session.facts = parsing.tracker_facts(
                    session.tracker, parsing.parse_observation(obs.text))
            _, session.recommendations = agents.loa_decide(
                session.graph, session.facts, session.config)
            session.observation = obs.text
            payload = _step_payload(session, obs)
            session.history.append({
                "observation": obs.text,
                "command": command_text,
                "reward": obs.reward,
                "recommendations": _recommendations_json(session.recommendations),
            })
            _broadcast(session, payload)
            return payload
        finally:
            session.lock.release()

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        session = store.get(session_id)
        return {
            "id": session.id,
            "game": session.game_id,
            "rulebook": session.rulebook_name,
            "observation": session.observation,
            "score": session.state.score,
            "done": session.state.done,
            "steps": session.state.steps,
            "facts": sorted(str(f) for f in session.facts),
            "recommendations": _recommendations_json(session.recommendations),
            "history": session.history,
        }

    @app.get("/api/sessions/{session_id}/lnn")
    def get_lnn(session_id: str):
        session = store.get(session_id)
        return session.graph.snapshot()

    @app.get("/api/sessions/{session_id}/events")
    async def session_events(session_id: str):
        session = store.get(session_id)
        queue: asyncio.Queue = asyncio.Queue()
        session.listeners.append(queue)

        async def stream():
            try:
                while True:
                    try:
                        payload = await asyncio.wait_for(queue.get(), timeout=15.0)
                        yield f"data: {json.dumps(payload)}\n\n"
                    except asyncio.TimeoutError:
                        yield ": keep-alive\n\n"
            finally:
                if queue in session.listeners:
                    session.listeners.remove(queue)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/api/runs")
    def list_runs():
        out = []
        if runs_dir:
            for path in sorted(Path(runs_dir).glob("*.jsonl")):
                try:
                    metrics = agents.read_metrics(path)
                except (ValueError, KeyError, IndexError):
                    continue
                out.append({
                    "id": path.stem,
                    "agent": metrics.agent_name,
                    "seed": metrics.seed,
                    "episodes": len(metrics.episodes),
                })
        return {"runs": out}

    @app.get("/api/runs/{run_id}")
    def get_run(run_id: str):
        path = Path(runs_dir or ".") / f"{run_id}.jsonl"
        if not runs_dir or not path.is_file():
            raise ApiError(404, "unknown_run", f"no run {run_id!r}")
        metrics = agents.read_metrics(path)
        return {
            "id": run_id,
            "agent": metrics.agent_name,
            "seed": metrics.seed,
            "episodes": [em.to_json() for em in metrics.episodes],
        }

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _broadcast(session: Session, payload: dict) -> None:
    for queue in list(session.listeners):
        try:
            queue.put_nowait(payload)
        except asyncio.QueueFull:  # pragma: no cover
            pass


def serve(port: int = 8080, ui_dir: str | None = None,
          runs_dir: str | None = None) -> None:
    """Blocking uvicorn server (used by the CLI serve command)."""
    import uvicorn

    app = create_app(runs_dir=runs_dir, ui_dir=ui_dir)
    uvicorn.run(app, host="0.0.0.0", port=port, log_level="warning")
