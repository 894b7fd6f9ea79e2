"""
Talking to the session service
==============================

Every frontend interaction is one JSON message with a type, a request id,
an optional session id, and a payload. The reply mirrors the request id;
long operations stream progress events before the terminal result. This
demo drives the protocol in-process; `netcontrast serve` exposes exactly
the same messages over WebSocket and HTTP.
"""

import asyncio
import json

from netcontrast.service import ServiceState


def show(tag, msg):
    print(f"{tag} {json.dumps(msg)[:100]}")


async def main():
    state = ServiceState()
    events = []

    async def emit(event):
        events.append(event)

    # Sessions are created against named datasets (uploads work too).
    reply = await state.handle({
        "type": "create_session", "request": 1,
        "payload": {"target": "karate", "background": "random1"},
    }, emit)
    show("<-", reply)
    sid = reply["payload"]["session"]

    # run_pipeline streams progress per phase, then returns the full
    # session payload: embeddings, loadings, layouts, feature labels.
    reply = await state.handle({
        "type": "run_pipeline", "request": 2, "session": sid,
        "payload": {"config": {"layout_iterations": 60}},
    }, emit)
    phases = {e["payload"]["phase"] for e in events}
    print(f"   {len(events)} progress events over phases: {sorted(phases)}")
    payload = reply["payload"]
    print(f"   alpha {payload['model']['alpha']:g}, "
          f"{len(payload['definitions'])} features, "
          f"axes {payload['embedding']['axis_labels']}")

    # Steering is the same request/reply shape. update_alpha requests may
    # arrive faster than refits; the service coalesces the backlog and
    # answers every waiter with the newest state.
    reply = await state.handle({
        "type": "update_alpha", "request": 3, "session": sid,
        "payload": {"alpha": 12.0},
    }, emit)
    print(f"   applied alpha {reply['payload']['applied_alpha']:g}")

    # Errors are typed, never stack traces.
    reply = await state.handle({
        "type": "select_feature", "request": 4, "session": sid,
        "payload": {"id": 999},
    }, emit)
    show("<-", reply)

    # Snapshots travel as JSON too, so a client can persist its view.
    reply = await state.handle(
        {"type": "get_snapshot", "request": 5, "session": sid}, emit)
    print(f"   snapshot keys: {sorted(reply['payload'])[:6]} ...")


asyncio.run(main())
