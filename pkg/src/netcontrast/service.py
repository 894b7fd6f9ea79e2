"""JSON message service hosting analysis sessions.

One protocol, two transports: a duplex WebSocket (progress events plus one
terminal reply per request) and plain HTTP POST (terminal reply only). Every
request envelope is {type, request, session?, payload?}; every terminal
reply is {type: result|error, request, payload}. Errors carry machine
readable codes. Rapid update_alpha messages are coalesced per session:
latest value wins, at most one recompute in flight, every request still gets
its own terminal reply.
"""

from __future__ import annotations

import asyncio
import json
import logging
import os
import threading
import uuid
from importlib import resources
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from starlette.websockets import WebSocket, WebSocketDisconnect

from . import datasets as ds
from . import generators, session as session_mod
from .graph import GraphParseError, load_attributes, load_edge_list

__all__ = ["ServiceState", "create_app", "serve", "ServiceError"]

log = logging.getLogger("netcontrast.service")

_MUTATING = {
    "run_pipeline",
    "update_alpha",
    "rotate",
    "select_feature",
    "set_selection",
}


class ServiceError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class _SessionEntry:
    def __init__(self, sid, target_name, background_name, target, background, config):
        self.id = sid
        self.target_name = target_name
        self.background_name = background_name
        self.target = target
        self.background = background
        self.config = config
        self.session = None  # set by run_pipeline
        self.lock = asyncio.Lock()
        self.alpha_pending: list[tuple[float, asyncio.Future]] = []
        self.alpha_worker: asyncio.Task | None = None


class ServiceState:
    """Transport-independent protocol implementation."""

    def __init__(
        self,
        data_dir: Path | None = None,
        max_sessions: int = 16,
        upload_cap_bytes: int = 16 * 1024 * 1024,
    ):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self.max_sessions = max_sessions
        self.upload_cap_bytes = upload_cap_bytes
        self.sessions: dict[str, _SessionEntry] = {}
        self.cancel_events: dict[object, threading.Event] = {}

    # -- plumbing ---------------------------------------------------------

    def _entry(self, msg: dict) -> _SessionEntry:
        sid = msg.get("session")
        entry = self.sessions.get(sid)
        if entry is None:
            raise ServiceError("session_not_found", f"no session {sid!r}")
        return entry

    def _live(self, entry: _SessionEntry) -> session_mod.Session:
        if entry.session is None:
            raise ServiceError(
                "session_not_run", "run_pipeline has not completed for this session"
            )
        return entry.session

    @staticmethod
    def _payload(msg: dict) -> dict:
        payload = msg.get("payload") or {}
        if not isinstance(payload, dict):
            raise ServiceError("invalid_payload", "payload must be an object")
        return payload

    async def handle(self, msg: dict, emit) -> dict:
        """Process one message; emit(event) streams progress; returns the
        terminal reply."""
        request_id = msg.get("request")
        try:
            if not isinstance(msg, dict) or "type" not in msg:
                raise ServiceError("invalid_payload", "message needs a type")
            handler = getattr(self, f"_msg_{msg['type']}", None)
            if handler is None:
                raise ServiceError("unknown_type", f"unknown type {msg['type']!r}")
            payload = await handler(msg, emit)
            return {"type": "result", "request": request_id, "payload": payload}
        except ServiceError as exc:
            log.warning("request=%s code=%s error=%s", request_id, exc.code, exc)
            return {
                "type": "error",
                "request": request_id,
                "payload": {"code": exc.code, "message": str(exc)},
            }
        except (ValueError, KeyError, IndexError, GraphParseError) as exc:
            log.warning("request=%s code=invalid_payload error=%s", request_id, exc)
            return {
                "type": "error",
                "request": request_id,
                "payload": {"code": "invalid_payload", "message": str(exc)},
            }
        except session_mod.PipelineCancelled:
            return {
                "type": "error",
                "request": request_id,
                "payload": {"code": "cancelled", "message": "pipeline cancelled"},
            }
        except Exception as exc:  # noqa: BLE001 - terminal reply contract
            log.exception("request=%s internal error", request_id)
            return {
                "type": "error",
                "request": request_id,
                "payload": {"code": "internal_error", "message": str(exc)},
            }

    async def _progressed(self, fn, request_id, emit):
        """Run fn(progress_cb) in a thread, forwarding progress events."""
        loop = asyncio.get_running_loop()
        queue: asyncio.Queue = asyncio.Queue()

        def progress(phase: str, fraction: float):
            loop.call_soon_threadsafe(
                queue.put_nowait, {"phase": phase, "fraction": fraction}
            )

        async def forward():
            while True:
                ev = await queue.get()
                if ev is None:
                    return
                await emit(
                    {"type": "progress", "request": request_id, "payload": ev}
                )

        task = asyncio.create_task(forward())
        try:
            return await asyncio.to_thread(fn, progress)
        finally:
            queue.put_nowait(None)
            await task

    # -- dataset messages -------------------------------------------------

    async def _msg_health(self, msg, emit) -> dict:
        return {"status": "ok"}

    async def _msg_list_datasets(self, msg, emit) -> dict:
        return {"datasets": ds.list_datasets(self.data_dir)}

    async def _msg_upload_graph(self, msg, emit) -> dict:
        p = self._payload(msg)
        for field in ("name", "text"):
            if field not in p:
                raise ServiceError("invalid_payload", f"upload needs {field!r}")
        text = p["text"]
        if len(text.encode()) > self.upload_cap_bytes:
            raise ServiceError(
                "upload_too_large",
                f"upload exceeds cap of {self.upload_cap_bytes} bytes",
            )
        if self.data_dir is None:
            raise ServiceError("no_data_dir", "service has no data directory")
        try:
            graph = load_edge_list(
                text,
                directed=bool(p.get("directed", False)),
                delimiter=p.get("delimiter"),
                has_weights=bool(p.get("has_weights", False)),
            )
            if p.get("attributes_csv"):
                graph = load_attributes(graph, p["attributes_csv"])
        except GraphParseError as exc:
            raise ServiceError("parse_error", str(exc)) from None
        ds.save_dataset(
            p["name"], graph, self.data_dir, description=p.get("description", "")
        )
        return {"name": p["name"], "n": graph.n, "l": graph.l}

    async def _msg_generate(self, msg, emit) -> dict:
        p = self._payload(msg)
        spec = p.get("spec")
        if not isinstance(spec, dict):
            raise ServiceError("invalid_payload", "generate needs a spec object")
        graph = generators.generate(spec)
        out = {"n": graph.n, "l": graph.l, "directed": graph.directed}
        if p.get("name"):
            if self.data_dir is None:
                raise ServiceError("no_data_dir", "service has no data directory")
            ds.save_dataset(
                p["name"], graph, self.data_dir, description=f"generated {spec}"
            )
            out["name"] = p["name"]
        return out

    # -- session lifecycle -------------------------------------------------

    async def _msg_create_session(self, msg, emit) -> dict:
        p = self._payload(msg)
        for field in ("target", "background"):
            if field not in p:
                raise ServiceError("invalid_payload", f"create_session needs {field!r}")
        if len(self.sessions) >= self.max_sessions:
            raise ServiceError(
                "too_many_sessions", f"limit of {self.max_sessions} sessions reached"
            )
        try:
            target = ds.load_dataset(p["target"], self.data_dir)
            background = ds.load_dataset(p["background"], self.data_dir)
        except ds.DatasetNotFound as exc:
            raise ServiceError("dataset_not_found", str(exc)) from None
        config = (
            session_mod.SessionConfig.from_json_dict(p["config"])
            if p.get("config")
            else session_mod.SessionConfig()
        )
        sid = uuid.uuid4().hex
        self.sessions[sid] = _SessionEntry(
            sid, p["target"], p["background"], target, background, config
        )
        log.info("session=%s created target=%s background=%s",
                 sid, p["target"], p["background"])
        return {
            "session": sid,
            "target": {"name": p["target"], "n": target.n, "l": target.l},
            "background": {
                "name": p["background"],
                "n": background.n,
                "l": background.l,
            },
        }

    async def _msg_run_pipeline(self, msg, emit) -> dict:
        entry = self._entry(msg)
        request_id = msg.get("request")
        cancel_event = threading.Event()
        self.cancel_events[request_id] = cancel_event
        try:
            async with entry.lock:
                result = await self._progressed(
                    lambda progress: session_mod.run_pipeline(
                        entry.target,
                        entry.background,
                        entry.config,
                        progress=progress,
                        cancel=cancel_event.is_set,
                        session_id=entry.id,
                    ),
                    request_id,
                    emit,
                )
                entry.session = result  # swap in only on success
        finally:
            self.cancel_events.pop(request_id, None)
        return self._session_payload(entry)

    async def _msg_cancel(self, msg, emit) -> dict:
        p = self._payload(msg)
        target = p.get("request")
        ev = self.cancel_events.get(target)
        if ev is None:
            return {"cancelled": False}
        ev.set()
        return {"cancelled": True}

    def _session_payload(self, entry: _SessionEntry) -> dict:
        s = self._live(entry)
        payload = s.snapshot(include_matrices=False)
        payload["notices"] = s.notices[:]
        s.notices.clear()
        return payload

    # -- steering messages --------------------------------------------------

    async def _msg_update_alpha(self, msg, emit) -> dict:
        entry = self._entry(msg)
        self._live(entry)
        p = self._payload(msg)
        if "alpha" not in p:
            raise ServiceError("invalid_payload", "update_alpha needs alpha")
        alpha = float(p["alpha"])
        fut: asyncio.Future = asyncio.get_running_loop().create_future()
        entry.alpha_pending.append((alpha, fut))
        if entry.alpha_worker is None or entry.alpha_worker.done():
            entry.alpha_worker = asyncio.create_task(self._alpha_worker(entry))
        return await fut

    async def _alpha_worker(self, entry: _SessionEntry):
        """Drain alpha updates: apply only the newest, answer everyone."""
        while entry.alpha_pending:
            batch = entry.alpha_pending
            entry.alpha_pending = []
            alpha = batch[-1][0]
            try:
                async with entry.lock:
                    await asyncio.to_thread(self._live(entry).update_alpha, alpha)
                payload = self._session_payload(entry)
                payload["applied_alpha"] = alpha
                for _, fut in batch:
                    if not fut.done():
                        fut.set_result(payload)
            except Exception as exc:  # noqa: BLE001 - futures must resolve
                for _, fut in batch:
                    if not fut.done():
                        fut.set_exception(exc)

    async def _msg_rotate(self, msg, emit) -> dict:
        entry = self._entry(msg)
        p = self._payload(msg)
        line = p.get("line")
        if (
            not isinstance(line, (list, tuple))
            or len(line) != 2
            or any(len(pt) != 2 for pt in line)
        ):
            raise ServiceError("invalid_payload", "rotate needs line=[[x,y],[x,y]]")
        async with entry.lock:
            s = self._live(entry)
            s.rotate_embedding(((line[0][0], line[0][1]), (line[1][0], line[1][1])))
            return self._session_payload(entry)

    async def _msg_select_feature(self, msg, emit) -> dict:
        entry = self._entry(msg)
        p = self._payload(msg)
        if "id" not in p:
            raise ServiceError("invalid_payload", "select_feature needs id")
        async with entry.lock:
            s = self._live(entry)
            s.select_feature(int(p["id"]))
            return {"current_feature": s.current_feature}

    async def _msg_set_selection(self, msg, emit) -> dict:
        entry = self._entry(msg)
        p = self._payload(msg)
        items = p.get("items")
        if not isinstance(items, list):
            raise ServiceError("invalid_payload", "set_selection needs items list")
        async with entry.lock:
            s = self._live(entry)
            s.set_selection([(tag, idx) for tag, idx in items])
            return {"selection": sorted([t, i] for t, i in s.selection)}

    # -- inspection messages -------------------------------------------------

    async def _msg_feature_colors(self, msg, emit) -> dict:
        entry = self._entry(msg)
        p = self._payload(msg)
        async with entry.lock:
            s = self._live(entry)
            colors = s.feature_colors(int(p.get("id", s.current_feature)))
            return {
                "target": colors["target"].tolist(),
                "background": colors["background"].tolist(),
            }

    async def _msg_feature_stages(self, msg, emit) -> dict:
        entry = self._entry(msg)
        p = self._payload(msg)
        which = p.get("which", "target")
        async with entry.lock:
            s = self._live(entry)
            stages = s.feature_stages(int(p.get("id", s.current_feature)), which)
            return {"which": which, "stages": [v.tolist() for v in stages]}

    async def _msg_histogram(self, msg, emit) -> dict:
        entry = self._entry(msg)
        p = self._payload(msg)
        async with entry.lock:
            s = self._live(entry)
            return s.histogram(
                int(p.get("id", s.current_feature)),
                bins=int(p.get("bins", 30)),
                y_scale=p.get("y_scale", "linear"),
            )

    async def _msg_get_snapshot(self, msg, emit) -> dict:
        entry = self._entry(msg)
        p = self._payload(msg)
        async with entry.lock:
            s = self._live(entry)
            return s.snapshot(include_matrices=bool(p.get("include_matrices", False)))


def protocol_schema() -> dict:
    return json.loads(
        resources.files("netcontrast").joinpath("protocol_schema.json").read_text()
    )


def create_app(
    data_dir: Path | None = None,
    max_sessions: int = 16,
    upload_cap_bytes: int = 16 * 1024 * 1024,
) -> FastAPI:
    state = ServiceState(data_dir, max_sessions, upload_cap_bytes)
    app = FastAPI(title="netcontrast service")
    app.state.service = state

    @app.get("/api/health")
    async def health():
        return {"status": "ok"}

    @app.get("/api/schema")
    async def schema():
        return protocol_schema()

    @app.post("/api/message")
    async def message(msg: dict):
        async def emit(event):  # plain HTTP has no progress channel
            return None

        return JSONResponse(await state.handle(msg, emit))

    @app.websocket("/ws")
    async def ws(socket: WebSocket):
        await socket.accept()
        send_lock = asyncio.Lock()

        async def emit(event):
            async with send_lock:
                await socket.send_text(json.dumps(event))

        tasks: set[asyncio.Task] = set()

        async def dispatch(msg):
            reply = await state.handle(msg, emit)
            await emit(reply)

        try:
            while True:
                raw = await socket.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await emit(
                        {
                            "type": "error",
                            "request": None,
                            "payload": {
                                "code": "invalid_payload",
                                "message": "not valid JSON",
                            },
                        }
                    )
                    continue
                task = asyncio.create_task(dispatch(msg))
                tasks.add(task)
                task.add_done_callback(tasks.discard)
        except WebSocketDisconnect:
            for task in tasks:
                task.cancel()

    return app


def serve(
    port: int | None = None,
    data_dir: Path | None = None,
    max_sessions: int = 16,
    host: str = "127.0.0.1",
):
    """Run the service with uvicorn; env fallbacks NETCONTRAST_PORT and
    NETCONTRAST_DATA_DIR."""
    import uvicorn

    if port is None:
        port = int(os.environ.get("NETCONTRAST_PORT", "8040"))
    if data_dir is None:
        data_dir = ds.data_dir_from_env()
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    app = create_app(Path(data_dir), max_sessions)
    uvicorn.run(app, host=host, port=port)
