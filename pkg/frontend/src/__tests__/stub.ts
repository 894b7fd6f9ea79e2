/**
 * Stub transport that replays a conversation recorded from the real
 * service (scripts/record_ui_fixture.py). Reply payloads are genuine
 * service output; only the session-independent plumbing (request ids,
 * selection echo bookkeeping) is reimplemented here, mirroring the
 * documented protocol guarantees.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type {
  ConnectionState,
  Envelope,
  FeatureColors,
  HistogramPayload,
  SessionPayload,
  Transport,
} from "../protocol.js";

const HERE = dirname(fileURLToPath(import.meta.url));

export interface Fixture {
  note: string;
  schema: { messages: Record<string, unknown> };
  create_session: { session: string } & Record<string, unknown>;
  run_pipeline: SessionPayload;
  progress_phases: string[];
  alpha_walk: Array<Partial<SessionPayload> & { applied_alpha: number }>;
  feature_colors: FeatureColors;
  feature_stages: { which: string; stages: number[][] };
  histogram: HistogramPayload;
  rotate: SessionPayload;
}

export function loadFixture(): Fixture {
  const raw = readFileSync(join(HERE, "fixtures", "replay.json"), "utf8");
  return JSON.parse(raw) as Fixture;
}

export class ReplayTransport implements Transport {
  readonly sent: Envelope[] = [];
  /** Alpha values actually applied, in service order. */
  readonly appliedAlphas: number[] = [];
  selection: [string, number][] = [];

  private messageHandlers: Array<(msg: Envelope) => void> = [];
  private stateHandlers: Array<(state: ConnectionState) => void> = [];
  private walkCursor = 0;
  /** Queue of deliveries; drained async so replies never beat the caller. */
  private queue: Envelope[] = [];
  private draining = false;

  constructor(private fixture: Fixture) {}

  open(): void {
    for (const handler of this.stateHandlers) handler("open");
  }

  disconnect(): void {
    for (const handler of this.stateHandlers) handler("closed");
  }

  send(msg: Envelope): void {
    this.sent.push(msg);
    this.reply(msg);
  }

  onMessage(handler: (msg: Envelope) => void): void {
    this.messageHandlers.push(handler);
  }

  onStateChange(handler: (state: ConnectionState) => void): void {
    this.stateHandlers.push(handler);
  }

  close(): void {
    this.disconnect();
  }

  /** Resolves when every queued reply has been delivered. */
  async settle(): Promise<void> {
    while (this.queue.length || this.draining) {
      await new Promise((resolve) => setTimeout(resolve, 0));
    }
  }

  private deliver(msg: Envelope): void {
    this.queue.push(msg);
    if (this.draining) return;
    this.draining = true;
    queueMicrotask(() => {
      while (this.queue.length) {
        const next = this.queue.shift()!;
        for (const handler of this.messageHandlers) handler(next);
      }
      this.draining = false;
    });
  }

  private result(request: Envelope["request"], payload: unknown): void {
    this.deliver({
      type: "result",
      request,
      payload: payload as Record<string, unknown>,
    });
  }

  private fail(request: Envelope["request"], code: string, message: string): void {
    this.deliver({ type: "error", request, payload: { code, message } });
  }

  private reply(msg: Envelope): void {
    const f = this.fixture;
    const p = (msg.payload ?? {}) as Record<string, unknown>;
    switch (msg.type) {
      case "create_session":
        this.result(msg.request, f.create_session);
        return;
      case "run_pipeline":
        for (const phase of f.progress_phases) {
          this.deliver({
            type: "progress",
            request: msg.request,
            payload: { phase, fraction: 1 },
          });
        }
        this.result(msg.request, withSelection(f.run_pipeline, this.selection));
        return;
      case "update_alpha": {
        // the recorded walk is ordered; serve the step for the asked alpha
        const step = f.alpha_walk[this.walkCursor];
        if (!step || step.applied_alpha !== p.alpha) {
          this.fail(msg.request, "invalid_payload",
            `replay expected alpha ${step?.applied_alpha}, got ${p.alpha}`);
          return;
        }
        this.walkCursor += 1;
        this.appliedAlphas.push(step.applied_alpha);
        this.result(msg.request, withSelection(
          { ...f.run_pipeline, ...step }, this.selection));
        return;
      }
      case "rotate":
        this.result(msg.request, withSelection(f.rotate, this.selection));
        return;
      case "set_selection":
        // mirror of the service: normalize, store, echo sorted
        this.selection = (p.items as [string, number][])
          .map(([tag, i]): [string, number] => [tag, i])
          .sort((a, b) =>
            a[0] === b[0] ? a[1] - b[1] : a[0] < b[0] ? -1 : 1);
        this.result(msg.request, { selection: this.selection });
        return;
      case "select_feature":
        this.result(msg.request, { current_feature: p.id });
        return;
      case "feature_colors":
        this.result(msg.request, f.feature_colors);
        return;
      case "feature_stages":
        this.result(msg.request, f.feature_stages);
        return;
      case "histogram":
        this.result(msg.request, f.histogram);
        return;
      case "get_snapshot":
        this.result(msg.request, f.run_pipeline);
        return;
      default:
        this.fail(msg.request, "unknown_type", `unknown type ${msg.type}`);
    }
  }
}

function withSelection(
  payload: SessionPayload,
  selection: [string, number][],
): SessionPayload {
  return { ...payload, selection };
}
