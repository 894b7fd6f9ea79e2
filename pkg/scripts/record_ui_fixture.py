#!/usr/bin/env python3
"""Record a real service conversation for the frontend replay tests.

Runs the session service in-process against the always-available
karate/random1 pair, walks the alpha slider across the full grid in both
directions, and writes every reply the UI would have received to
frontend/src/__tests__/fixtures/replay.json. The frontend tests replay
this file through a stub transport, so what they assert about rendering
and sign stability is grounded in actual service output rather than
hand-written mocks. Re-run after changing the protocol or the pipeline.
"""

import asyncio
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from netcontrast.contrast import DEFAULT_ALPHA_GRID  # noqa: E402
from netcontrast.service import ServiceState, protocol_schema  # noqa: E402

OUT = ROOT / "frontend" / "src" / "__tests__" / "fixtures" / "replay.json"

# Per-step fields that actually change when only alpha changes. The stub
# transport merges these over the base run_pipeline payload.
STEP_KEYS = ("applied_alpha", "embedding", "model", "current_feature",
             "selection", "notices")


async def record() -> dict:
    state = ServiceState()
    progress = []

    async def emit(event):
        progress.append(event)

    req = 0

    async def call(type_, session=None, **payload):
        nonlocal req
        req += 1
        msg = {"type": type_, "request": req, "payload": payload}
        if session is not None:
            msg["session"] = session
        reply = await state.handle(msg, emit)
        if reply["type"] != "result":
            raise RuntimeError(f"{type_} failed: {reply['payload']}")
        return reply["payload"]

    created = await call("create_session",
                         target="karate", background="random1",
                         config={"layout_iterations": 120})
    sid = created["session"]
    base = await call("run_pipeline", session=sid)

    walk = list(DEFAULT_ALPHA_GRID[1:]) + list(reversed(DEFAULT_ALPHA_GRID[:-1]))
    steps = []
    for alpha in walk:
        payload = await call("update_alpha", session=sid, alpha=float(alpha))
        steps.append({k: payload[k] for k in STEP_KEYS})

    chained = max(base["definitions"], key=lambda d: len(d["chain"]))
    return {
        "note": "recorded by scripts/record_ui_fixture.py against the "
                "bundled karate/random1 pair",
        "schema": protocol_schema(),
        "create_session": created,
        "run_pipeline": base,
        "progress_phases": [e["payload"]["phase"] for e in progress],
        "alpha_walk": steps,
        "feature_colors": await call("feature_colors", session=sid),
        "feature_stages": await call("feature_stages", session=sid,
                                     id=chained["id"], which="target"),
        "histogram": await call("histogram", session=sid),
        "rotate": await call("rotate", session=sid,
                             line=[[0.0, 0.0], [1.0, 0.7]]),
    }


def main() -> int:
    fixture = asyncio.run(record())
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(fixture) + "\n")
    size = OUT.stat().st_size / 1024
    print(f"wrote {OUT} ({size:.0f} KiB, "
          f"{len(fixture['alpha_walk'])} alpha steps)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
