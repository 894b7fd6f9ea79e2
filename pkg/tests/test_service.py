import asyncio
import json
import threading

import pytest
from fastapi.testclient import TestClient

from netcontrast.service import ServiceState, create_app, protocol_schema

FAST = {"alpha": 1.0, "layout_iterations": 40}


async def _noop_emit(event):
    return None


def _run(coro):
    return asyncio.run(coro)


async def _setup_session(state, config=FAST, target="karate", background="random1"):
    reply = await state.handle(
        {
            "type": "create_session",
            "request": "c1",
            "payload": {"target": target, "background": background, "config": config},
        },
        _noop_emit,
    )
    assert reply["type"] == "result", reply
    sid = reply["payload"]["session"]
    reply = await state.handle(
        {"type": "run_pipeline", "request": "r1", "session": sid}, _noop_emit
    )
    assert reply["type"] == "result", reply
    return sid, reply["payload"]


# ---------------------------------------------------------------- envelope

def test_every_message_gets_exactly_one_terminal_reply():
    async def main():
        state = ServiceState()
        reply = await state.handle(
            {"type": "health", "request": "abc"}, _noop_emit
        )
        assert reply == {"type": "result", "request": "abc", "payload": {"status": "ok"}}
        reply = await state.handle({"type": "warp", "request": 9}, _noop_emit)
        assert reply["type"] == "error"
        assert reply["request"] == 9
        assert reply["payload"]["code"] == "unknown_type"
        reply = await state.handle({"request": 1}, _noop_emit)
        assert reply["payload"]["code"] == "invalid_payload"

    _run(main())


def test_session_error_codes():
    async def main():
        state = ServiceState()
        reply = await state.handle(
            {"type": "get_snapshot", "request": 1, "session": "ghost"}, _noop_emit
        )
        assert reply["payload"]["code"] == "session_not_found"
        sid = (
            await state.handle(
                {
                    "type": "create_session",
                    "request": 2,
                    "payload": {"target": "karate", "background": "random1"},
                },
                _noop_emit,
            )
        )["payload"]["session"]
        reply = await state.handle(
            {"type": "get_snapshot", "request": 3, "session": sid}, _noop_emit
        )
        assert reply["payload"]["code"] == "session_not_run"

    _run(main())


def test_create_session_error_codes():
    async def main():
        state = ServiceState(max_sessions=1)
        reply = await state.handle(
            {
                "type": "create_session",
                "request": 1,
                "payload": {"target": "karate", "background": "missing-set"},
            },
            _noop_emit,
        )
        assert reply["payload"]["code"] == "dataset_not_found"
        reply = await state.handle(
            {"type": "create_session", "request": 2, "payload": {"target": "karate"}},
            _noop_emit,
        )
        assert reply["payload"]["code"] == "invalid_payload"
        ok = await state.handle(
            {
                "type": "create_session",
                "request": 3,
                "payload": {"target": "karate", "background": "random1"},
            },
            _noop_emit,
        )
        assert ok["type"] == "result"
        assert ok["payload"]["target"] == {"name": "karate", "n": 34, "l": 78}
        reply = await state.handle(
            {
                "type": "create_session",
                "request": 4,
                "payload": {"target": "karate", "background": "random1"},
            },
            _noop_emit,
        )
        assert reply["payload"]["code"] == "too_many_sessions"

    _run(main())


# ---------------------------------------------------------------- datasets

def test_list_datasets_message():
    async def main():
        state = ServiceState()
        reply = await state.handle({"type": "list_datasets", "request": 1}, _noop_emit)
        names = {d["name"] for d in reply["payload"]["datasets"]}
        assert {"karate", "random1", "price2"} <= names

    _run(main())


def test_upload_graph_paths(data_dir):
    async def main():
        state = ServiceState(data_dir=data_dir, upload_cap_bytes=64)
        ok = await state.handle(
            {
                "type": "upload_graph",
                "request": 1,
                "payload": {"name": "up1", "text": "a b\nb c"},
            },
            _noop_emit,
        )
        assert ok["payload"] == {"name": "up1", "n": 3, "l": 2}
        listed = await state.handle({"type": "list_datasets", "request": 2}, _noop_emit)
        assert any(d["name"] == "up1" for d in listed["payload"]["datasets"])

        bad = await state.handle(
            {
                "type": "upload_graph",
                "request": 3,
                "payload": {"name": "up2", "text": "a b c d"},
            },
            _noop_emit,
        )
        assert bad["payload"]["code"] == "parse_error"

        big = await state.handle(
            {
                "type": "upload_graph",
                "request": 4,
                "payload": {"name": "up3", "text": "x y\n" * 40},
            },
            _noop_emit,
        )
        assert big["payload"]["code"] == "upload_too_large"

        missing = await state.handle(
            {"type": "upload_graph", "request": 5, "payload": {"name": "up4"}},
            _noop_emit,
        )
        assert missing["payload"]["code"] == "invalid_payload"

    _run(main())


def test_upload_without_data_dir_is_rejected():
    async def main():
        state = ServiceState(data_dir=None)
        reply = await state.handle(
            {
                "type": "upload_graph",
                "request": 1,
                "payload": {"name": "x", "text": "a b"},
            },
            _noop_emit,
        )
        assert reply["payload"]["code"] == "no_data_dir"

    _run(main())


def test_generate_message(data_dir):
    async def main():
        state = ServiceState(data_dir=data_dir)
        reply = await state.handle(
            {
                "type": "generate",
                "request": 1,
                "payload": {"spec": {"kind": "gilbert", "n": 30, "p": 0.2, "seed": 5}},
            },
            _noop_emit,
        )
        assert reply["payload"]["n"] == 30 and not reply["payload"]["directed"]

        named = await state.handle(
            {
                "type": "generate",
                "request": 2,
                "payload": {
                    "spec": {"kind": "price", "n": 20, "c": 2, "seed": 1},
                    "name": "gen1",
                },
            },
            _noop_emit,
        )
        assert named["payload"]["name"] == "gen1"
        listed = await state.handle({"type": "list_datasets", "request": 3}, _noop_emit)
        assert any(d["name"] == "gen1" for d in listed["payload"]["datasets"])

        bad = await state.handle(
            {"type": "generate", "request": 4, "payload": {}}, _noop_emit
        )
        assert bad["payload"]["code"] == "invalid_payload"

    _run(main())


# ---------------------------------------------------------------- pipeline

def test_run_pipeline_emits_correlated_progress():
    events = []

    async def emit(event):
        events.append(event)

    async def main():
        state = ServiceState()
        sid = (
            await state.handle(
                {
                    "type": "create_session",
                    "request": 1,
                    "payload": {
                        "target": "karate",
                        "background": "random1",
                        "config": FAST,
                    },
                },
                _noop_emit,
            )
        )["payload"]["session"]
        reply = await state.handle(
            {"type": "run_pipeline", "request": "rp", "session": sid}, emit
        )
        assert reply["type"] == "result"
        payload = reply["payload"]
        assert payload["id"] == sid
        assert len(payload["embedding"]["target"]) == 34
        assert payload["model"]["alpha"] == 1.0
        return payload

    _run(main())
    assert events, "no progress events emitted"
    phases = protocol_schema()["messages"]["run_pipeline"]["progress_phases"]
    for ev in events:
        assert ev["type"] == "progress"
        assert ev["request"] == "rp"
        assert ev["payload"]["phase"] in phases
        assert 0.0 <= ev["payload"]["fraction"] <= 1.0
    seen_phases = [e["payload"]["phase"] for e in events]
    assert seen_phases.index("screen-bases") < seen_phases.index("layout-background")


def test_cancel_aborts_pipeline_and_leaves_session_unrun():
    async def main():
        state = ServiceState()
        sid = (
            await state.handle(
                {
                    "type": "create_session",
                    "request": 1,
                    "payload": {
                        "target": "karate",
                        "background": "random1",
                        "config": FAST,
                    },
                },
                _noop_emit,
            )
        )["payload"]["session"]

        cancelled = asyncio.Event()

        async def emit(event):
            # cancel as soon as the first progress event shows up
            if not cancelled.is_set():
                cancelled.set()
                reply = await state.handle(
                    {"type": "cancel", "request": 99, "payload": {"request": "rp"}},
                    _noop_emit,
                )
                assert reply["payload"] == {"cancelled": True}

        reply = await state.handle(
            {"type": "run_pipeline", "request": "rp", "session": sid}, emit
        )
        assert reply["type"] == "error"
        assert reply["payload"]["code"] == "cancelled"

        snap = await state.handle(
            {"type": "get_snapshot", "request": 2, "session": sid}, _noop_emit
        )
        assert snap["payload"]["code"] == "session_not_run"

        # cancelling an unknown request is a soft no
        miss = await state.handle(
            {"type": "cancel", "request": 3, "payload": {"request": "nope"}},
            _noop_emit,
        )
        assert miss["payload"] == {"cancelled": False}

    _run(main())


# ---------------------------------------------------------------- steering

def test_update_alpha_message_and_notices():
    async def main():
        state = ServiceState()
        sid, first = await _setup_session(state)
        reply = await state.handle(
            {
                "type": "update_alpha",
                "request": 2,
                "session": sid,
                "payload": {"alpha": 4.0},
            },
            _noop_emit,
        )
        assert reply["type"] == "result"
        assert reply["payload"]["applied_alpha"] == 4.0
        assert reply["payload"]["model"]["alpha"] == 4.0
        assert reply["payload"]["notices"] == []

        # rotation followed by an alpha change resets the rotation
        rot = await state.handle(
            {
                "type": "rotate",
                "request": 3,
                "session": sid,
                "payload": {"line": [[0, 0], [1, 1]]},
            },
            _noop_emit,
        )
        assert rot["payload"]["model"]["rotated"]
        after = await state.handle(
            {
                "type": "update_alpha",
                "request": 4,
                "session": sid,
                "payload": {"alpha": 5.0},
            },
            _noop_emit,
        )
        assert "rotation_reset" in after["payload"]["notices"]
        assert not after["payload"]["model"]["rotated"]
        # notices are delivered once
        again = await state.handle(
            {
                "type": "update_alpha",
                "request": 5,
                "session": sid,
                "payload": {"alpha": 5.5},
            },
            _noop_emit,
        )
        assert again["payload"]["notices"] == []

        bad = await state.handle(
            {"type": "update_alpha", "request": 6, "session": sid, "payload": {}},
            _noop_emit,
        )
        assert bad["payload"]["code"] == "invalid_payload"

    _run(main())


def test_update_alpha_storm_coalesces_to_latest(monkeypatch):
    """Concurrent alpha updates collapse: one recompute serves the backlog."""

    async def main():
        state = ServiceState()
        sid, _ = await _setup_session(state)
        sess = state.sessions[sid].session

        calls = []
        started = threading.Event()
        release = threading.Event()
        inner = sess.update_alpha

        def slow_update(alpha):
            calls.append(alpha)
            started.set()
            assert release.wait(10), "test deadlock"
            return inner(alpha)

        monkeypatch.setattr(sess, "update_alpha", slow_update)

        def alpha_msg(req, alpha):
            return {
                "type": "update_alpha",
                "request": req,
                "session": sid,
                "payload": {"alpha": alpha},
            }

        first = asyncio.create_task(state.handle(alpha_msg("a0", 1.5), _noop_emit))
        await asyncio.to_thread(started.wait, 10)  # first recompute in flight
        storm = [
            asyncio.create_task(state.handle(alpha_msg(f"a{i}", 1.0 + i), _noop_emit))
            for i in range(1, 6)
        ]
        await asyncio.sleep(0.1)  # let the storm enqueue behind the worker
        release.set()
        replies = await asyncio.gather(first, *storm)

        # exactly two recomputes: the in-flight one plus one for the backlog
        assert calls == [1.5, 6.0]
        for reply in replies:
            assert reply["type"] == "result"
        assert replies[0]["payload"]["applied_alpha"] == 1.5
        backlog = [json.dumps(r["payload"], sort_keys=True) for r in replies[1:]]
        assert len(set(backlog)) == 1  # identical payload for every waiter
        assert replies[-1]["payload"]["applied_alpha"] == 6.0
        assert sess.model.alpha == 6.0

    _run(main())


def test_rotate_select_selection_messages():
    async def main():
        state = ServiceState()
        sid, payload = await _setup_session(state)

        bad = await state.handle(
            {
                "type": "rotate",
                "request": 1,
                "session": sid,
                "payload": {"line": [[0, 0]]},
            },
            _noop_emit,
        )
        assert bad["payload"]["code"] == "invalid_payload"

        ids = [d["id"] for d in payload["definitions"]]
        sel = await state.handle(
            {
                "type": "select_feature",
                "request": 2,
                "session": sid,
                "payload": {"id": ids[1]},
            },
            _noop_emit,
        )
        assert sel["payload"] == {"current_feature": ids[1]}
        unknown = await state.handle(
            {
                "type": "select_feature",
                "request": 3,
                "session": sid,
                "payload": {"id": 10_000},
            },
            _noop_emit,
        )
        assert unknown["payload"]["code"] == "invalid_payload"

        picked = await state.handle(
            {
                "type": "set_selection",
                "request": 4,
                "session": sid,
                "payload": {"items": [["target", 3], ["background", 0]]},
            },
            _noop_emit,
        )
        assert picked["payload"]["selection"] == [["background", 0], ["target", 3]]
        out_of_range = await state.handle(
            {
                "type": "set_selection",
                "request": 5,
                "session": sid,
                "payload": {"items": [["target", 999]]},
            },
            _noop_emit,
        )
        assert out_of_range["payload"]["code"] == "invalid_payload"

    _run(main())


def test_inspection_messages():
    async def main():
        state = ServiceState()
        sid, payload = await _setup_session(state)

        colors = await state.handle(
            {"type": "feature_colors", "request": 1, "session": sid, "payload": {}},
            _noop_emit,
        )
        assert len(colors["payload"]["target"]) == 34
        assert len(colors["payload"]["background"]) == 100
        all_vals = colors["payload"]["target"] + colors["payload"]["background"]
        assert min(all_vals) == 0.0 and max(all_vals) == 1.0

        two_hop = next(d for d in payload["definitions"] if len(d["chain"]) == 2)
        stages = await state.handle(
            {
                "type": "feature_stages",
                "request": 2,
                "session": sid,
                "payload": {"id": two_hop["id"], "which": "background"},
            },
            _noop_emit,
        )
        assert stages["payload"]["which"] == "background"
        assert len(stages["payload"]["stages"]) == 3

        hist = await state.handle(
            {
                "type": "histogram",
                "request": 3,
                "session": sid,
                "payload": {"bins": 10, "y_scale": "log"},
            },
            _noop_emit,
        )
        assert hist["payload"]["y_scale"] == "log"
        assert len(hist["payload"]["target"]) == 10

        snap = await state.handle(
            {
                "type": "get_snapshot",
                "request": 4,
                "session": sid,
                "payload": {"include_matrices": True},
            },
            _noop_emit,
        )
        assert "matrices" in snap["payload"]
        assert snap["payload"]["version"] == 1

    _run(main())


# ---------------------------------------------------------------- schema

def test_schema_covers_implementation():
    schema = protocol_schema()
    assert schema["schema_version"] == 1
    implemented = {
        name[len("_msg_"):]
        for name in dir(ServiceState)
        if name.startswith("_msg_")
    }
    assert set(schema["messages"]) == implemented
    for code in (
        "invalid_payload",
        "unknown_type",
        "dataset_not_found",
        "session_not_found",
        "session_not_run",
        "too_many_sessions",
        "upload_too_large",
        "parse_error",
        "no_data_dir",
        "cancelled",
        "internal_error",
    ):
        assert code in schema["error_codes"]
    assert schema["messages"]["run_pipeline"]["progress_phases"] == [
        "screen-bases",
        "learn-features",
        "matrices",
        "alpha",
        "fit",
        "layout-target",
        "layout-background",
    ]


# ---------------------------------------------------------------- transports

def test_http_endpoints(data_dir):
    app = create_app(data_dir=data_dir)
    client = TestClient(app)
    assert client.get("/api/health").json() == {"status": "ok"}
    schema = client.get("/api/schema").json()
    assert schema["schema_version"] == 1

    reply = client.post("/api/message", json={"type": "health", "request": 7}).json()
    assert reply == {"type": "result", "request": 7, "payload": {"status": "ok"}}

    created = client.post(
        "/api/message",
        json={
            "type": "create_session",
            "request": 8,
            "payload": {"target": "karate", "background": "random1", "config": FAST},
        },
    ).json()
    sid = created["payload"]["session"]
    # plain HTTP runs the pipeline without a progress channel
    done = client.post(
        "/api/message",
        json={"type": "run_pipeline", "request": 9, "session": sid},
    ).json()
    assert done["type"] == "result"
    assert len(done["payload"]["embedding"]["target"]) == 34


def test_websocket_duplex_flow(data_dir):
    app = create_app(data_dir=data_dir)
    client = TestClient(app)
    with client.websocket_connect("/ws") as ws:
        ws.send_text("this is not json")
        reply = json.loads(ws.receive_text())
        assert reply["type"] == "error"
        assert reply["payload"]["code"] == "invalid_payload"

        ws.send_text(
            json.dumps(
                {
                    "type": "create_session",
                    "request": "ws1",
                    "payload": {
                        "target": "karate",
                        "background": "random1",
                        "config": FAST,
                    },
                }
            )
        )
        created = json.loads(ws.receive_text())
        assert created["type"] == "result" and created["request"] == "ws1"
        sid = created["payload"]["session"]

        ws.send_text(
            json.dumps({"type": "run_pipeline", "request": "ws2", "session": sid})
        )
        progress = []
        while True:
            msg = json.loads(ws.receive_text())
            if msg["type"] == "progress":
                progress.append(msg)
                continue
            break
        assert msg["type"] == "result" and msg["request"] == "ws2"
        assert progress, "websocket clients get streamed progress"
        assert all(p["request"] == "ws2" for p in progress)

        # follow-up steering on the same socket
        ws.send_text(
            json.dumps(
                {
                    "type": "update_alpha",
                    "request": "ws3",
                    "session": sid,
                    "payload": {"alpha": 2.0},
                }
            )
        )
        updated = json.loads(ws.receive_text())
        assert updated["request"] == "ws3"
        assert updated["payload"]["applied_alpha"] == 2.0
