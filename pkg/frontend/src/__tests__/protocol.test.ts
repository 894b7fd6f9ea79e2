/**
 * Client protocol behavior against a hand-driven transport: request
 * correlation, typed errors, progress routing, stale-payload discard and
 * alpha coalescing.
 */

import { describe, expect, test } from "vitest";

import {
  RequestFailed,
  SessionClient,
  type ConnectionState,
  type Envelope,
  type Transport,
} from "../protocol.js";

class ManualTransport implements Transport {
  sent: Envelope[] = [];
  private handlers: Array<(msg: Envelope) => void> = [];

  send(msg: Envelope): void {
    this.sent.push(msg);
  }

  onMessage(handler: (msg: Envelope) => void): void {
    this.handlers.push(handler);
  }

  onStateChange(_handler: (state: ConnectionState) => void): void {}

  close(): void {}

  emit(msg: Envelope): void {
    for (const handler of this.handlers) handler(msg);
  }

  /** Answer the i-th sent message with a result payload. */
  result(index: number, payload: unknown): void {
    this.emit({
      type: "result",
      request: this.sent[index].request,
      payload: payload as Record<string, unknown>,
    });
  }
}

const tick = () => new Promise<void>((resolve) => setTimeout(resolve, 0));

function fresh(): { transport: ManualTransport; client: SessionClient } {
  const transport = new ManualTransport();
  return { transport, client: new SessionClient(transport) };
}

describe("request plumbing", () => {
  test("replies correlate by request id, not arrival order", async () => {
    const { transport, client } = fresh();
    const first = client.request("feature_colors", "s", { id: 1 });
    const second = client.request("feature_colors", "s", { id: 2 });
    expect(transport.sent.map((m) => m.request)).toEqual([1, 2]);
    expect(transport.sent.every((m) => m.session === "s")).toBe(true);

    transport.result(1, { marker: "second" });
    transport.result(0, { marker: "first" });
    await expect(first).resolves.toEqual({ marker: "first" });
    await expect(second).resolves.toEqual({ marker: "second" });
  });

  test("replies for unknown request ids are ignored", () => {
    const { transport } = fresh();
    expect(() =>
      transport.emit({ type: "result", request: 99, payload: {} }),
    ).not.toThrow();
  });

  test("service errors reject with their code and message", async () => {
    const { transport, client } = fresh();
    const call = client.request("run_pipeline", "s");
    transport.emit({
      type: "error",
      request: transport.sent[0].request,
      payload: { code: "unknown_dataset", message: "no dataset named x" },
    });
    const err = await call.then(
      () => null,
      (e: unknown) => e,
    );
    expect(err).toBeInstanceOf(RequestFailed);
    expect((err as RequestFailed).code).toBe("unknown_dataset");
    expect((err as RequestFailed).message).toBe("no dataset named x");
  });

  test("progress events reach the caller without settling the request", async () => {
    const { transport, client } = fresh();
    const phases: string[] = [];
    let settled = false;
    const run = client
      .runPipeline("s", (ev) => phases.push(ev.phase))
      .then((payload) => {
        settled = true;
        return payload;
      });

    const id = transport.sent[0].request;
    transport.emit({
      type: "progress",
      request: id,
      payload: { phase: "fit", fraction: 0.5 },
    });
    transport.emit({
      type: "progress",
      request: id,
      payload: { phase: "layout-target", fraction: 1 },
    });
    await tick();
    expect(phases).toEqual(["fit", "layout-target"]);
    expect(settled).toBe(false);

    transport.result(0, { id: "done" });
    await run;
    expect(settled).toBe(true);
  });
});

describe("session state ordering", () => {
  test("stale session payloads never overwrite newer ones", async () => {
    const { transport, client } = fresh();
    const seen: string[] = [];
    client.onSession((payload) => seen.push(payload.id));

    const older = client.runPipeline("s");
    const newer = client.runPipeline("s");
    transport.result(1, { id: "newer" });
    await tick();
    transport.result(0, { id: "older" });
    await Promise.all([older, newer]);
    expect(seen).toEqual(["newer"]);
  });

  test("slider-rate alpha updates coalesce to one in-flight request", async () => {
    const { transport, client } = fresh();
    const applied: number[] = [];
    client.onSession((payload) =>
      applied.push((payload as unknown as { alpha: number }).alpha));
    const updates = () =>
      transport.sent
        .filter((m) => m.type === "update_alpha")
        .map((m) => (m.payload as { alpha: number }).alpha);

    client.setAlpha("s", 0.1);
    client.setAlpha("s", 0.5);
    client.setAlpha("s", 2.0);
    // one refit in flight; intermediate values were overwritten
    expect(updates()).toEqual([0.1]);

    transport.result(0, { alpha: 0.1 });
    await tick();
    expect(updates()).toEqual([0.1, 2.0]);

    transport.result(1, { alpha: 2.0 });
    await tick();
    expect(updates()).toEqual([0.1, 2.0]);
    expect(applied).toEqual([0.1, 2.0]);

    // the pump restarts cleanly for the next gesture
    client.setAlpha("s", 7.0);
    expect(updates()).toEqual([0.1, 2.0, 7.0]);
    transport.result(2, { alpha: 7.0 });
    await tick();
    expect(applied).toEqual([0.1, 2.0, 7.0]);
  });
});
