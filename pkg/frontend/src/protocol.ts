/**
 * Typed client for the session service JSON protocol.
 *
 * Every request is one envelope {type, request, session, payload} answered
 * by exactly one terminal reply ({type: "result"} or {type: "error"});
 * long operations stream {type: "progress"} events first. The client owns
 * request-id correlation, discards stale session payloads, and coalesces
 * slider-speed update_alpha traffic so at most one refit request is in
 * flight per session.
 */

export type NetworkTag = "target" | "background";

export interface OperatorJson {
  summary: "mean" | "sum" | "max" | "l2norm";
  direction: "in" | "out" | "all";
}

export interface DefinitionJson {
  id: number;
  base: string;
  chain: OperatorJson[];
}

export interface EmbeddingJson {
  target: number[][];
  background: number[][];
  axis_labels: string[];
}

export interface ModelJson {
  alpha: number;
  components: number[][];
  eigenvalues: number[];
  scaled_loadings: number[][];
  rotated: boolean;
  degenerate: boolean;
}

export interface LayoutJson {
  positions: number[][];
  seed: number;
}

export interface GraphInfoJson {
  n: number;
  l: number;
  directed: boolean;
}

export interface SessionConfigJson {
  alpha_grid: number[];
  [key: string]: unknown;
}

/** Full session state as returned by run_pipeline, update_alpha, rotate. */
export interface SessionPayload {
  id: string;
  config: SessionConfigJson;
  definitions: DefinitionJson[];
  model: ModelJson;
  embedding: EmbeddingJson;
  layouts: { target: LayoutJson; background: LayoutJson };
  graphs: { target: GraphInfoJson; background: GraphInfoJson };
  current_feature: number;
  feature_pinned: boolean;
  selection: [string, number][];
  warnings: string[];
  notices?: string[];
  applied_alpha?: number;
}

export interface FeatureColors {
  target: number[];
  background: number[];
}

export interface HistogramPayload {
  y_scale: string;
  target: [number, number][];
  background: [number, number][];
}

export interface ProgressEvent {
  phase: string;
  fraction: number;
}

export interface ServiceError {
  code: string;
  message: string;
}

export interface Envelope {
  type: string;
  request?: string | number | null;
  session?: string;
  payload?: Record<string, unknown>;
}

export type ConnectionState = "connecting" | "open" | "closed";

/** Message transport; WebSocketTransport for production, stubs in tests.
 *  Both handler registrations are additive. */
export interface Transport {
  send(msg: Envelope): void;
  onMessage(handler: (msg: Envelope) => void): void;
  onStateChange(handler: (state: ConnectionState) => void): void;
  close(): void;
}

export class WebSocketTransport implements Transport {
  private socket: WebSocket;
  private messageHandlers: Array<(msg: Envelope) => void> = [];
  private stateHandlers: Array<(state: ConnectionState) => void> = [];

  constructor(url: string) {
    this.socket = new WebSocket(url);
    const notify = (state: ConnectionState) => {
      for (const handler of this.stateHandlers) handler(state);
    };
    this.socket.onopen = () => notify("open");
    this.socket.onclose = () => notify("closed");
    this.socket.onerror = () => notify("closed");
    this.socket.onmessage = (event) => {
      const msg = JSON.parse(String(event.data)) as Envelope;
      for (const handler of this.messageHandlers) handler(msg);
    };
  }

  send(msg: Envelope): void {
    this.socket.send(JSON.stringify(msg));
  }

  onMessage(handler: (msg: Envelope) => void): void {
    this.messageHandlers.push(handler);
  }

  onStateChange(handler: (state: ConnectionState) => void): void {
    this.stateHandlers.push(handler);
  }

  close(): void {
    this.socket.close();
  }
}

interface Pending {
  resolve: (payload: Record<string, unknown>) => void;
  reject: (err: Error) => void;
  onProgress?: (ev: ProgressEvent) => void;
}

export class RequestFailed extends Error {
  constructor(readonly code: string, message: string) {
    super(message);
  }
}

export class SessionClient {
  private nextId = 1;
  private pending = new Map<string | number, Pending>();
  /** Highest request id whose session payload has been applied; anything
   *  older is stale and must not overwrite newer state. */
  private appliedSeq = 0;
  private sessionListener: ((payload: SessionPayload) => void) | null = null;

  /** Client-side update_alpha coalescing: one in-flight refit, only the
   *  newest pending value is sent when it returns. */
  private alphaInFlight = false;
  private alphaPending: number | null = null;

  constructor(private transport: Transport) {
    transport.onMessage((msg) => this.dispatch(msg));
  }

  /** Register the single sink for session payloads; stale ones are dropped
   *  before it is called. */
  onSession(listener: (payload: SessionPayload) => void): void {
    this.sessionListener = listener;
  }

  private dispatch(msg: Envelope): void {
    const id = msg.request ?? undefined;
    if (id === undefined) return;
    const entry = this.pending.get(id);
    if (!entry) return;
    if (msg.type === "progress") {
      entry.onProgress?.(msg.payload as unknown as ProgressEvent);
      return;
    }
    this.pending.delete(id);
    if (msg.type === "error") {
      const err = msg.payload as unknown as ServiceError;
      entry.reject(new RequestFailed(err.code, err.message));
    } else {
      entry.resolve(msg.payload ?? {});
    }
  }

  request(
    type: string,
    session?: string,
    payload?: Record<string, unknown>,
    onProgress?: (ev: ProgressEvent) => void,
  ): Promise<Record<string, unknown>> {
    const id = this.nextId++;
    return new Promise((resolve, reject) => {
      this.pending.set(id, { resolve, reject, onProgress });
      const msg: Envelope = { type, request: id, payload: payload ?? {} };
      if (session !== undefined) msg.session = session;
      this.transport.send(msg);
    });
  }

  /** Apply a session payload unless a newer one already arrived. */
  private applySession(payload: Record<string, unknown>, seq: number): void {
    if (seq <= this.appliedSeq) return;
    this.appliedSeq = seq;
    this.sessionListener?.(payload as unknown as SessionPayload);
  }

  private async sessionRequest(
    type: string,
    session: string,
    payload?: Record<string, unknown>,
    onProgress?: (ev: ProgressEvent) => void,
  ): Promise<SessionPayload> {
    const seq = this.nextId; // request() will consume exactly this id
    const reply = await this.request(type, session, payload, onProgress);
    this.applySession(reply, seq);
    return reply as unknown as SessionPayload;
  }

  async createSession(
    target: string,
    background: string,
    config?: Record<string, unknown>,
  ): Promise<{ session: string }> {
    const reply = await this.request("create_session", undefined, {
      target,
      background,
      ...(config ? { config } : {}),
    });
    return reply as { session: string };
  }

  runPipeline(
    session: string,
    onProgress?: (ev: ProgressEvent) => void,
  ): Promise<SessionPayload> {
    return this.sessionRequest("run_pipeline", session, {}, onProgress);
  }

  /** Slider-rate entry point; resolves when the value has been painted or
   *  superseded. */
  setAlpha(session: string, alpha: number): void {
    this.alphaPending = alpha;
    if (!this.alphaInFlight) void this.pumpAlpha(session);
  }

  private async pumpAlpha(session: string): Promise<void> {
    this.alphaInFlight = true;
    try {
      while (this.alphaPending !== null) {
        const alpha = this.alphaPending;
        this.alphaPending = null;
        await this.sessionRequest("update_alpha", session, { alpha });
      }
    } finally {
      this.alphaInFlight = false;
    }
  }

  rotate(
    session: string,
    line: [[number, number], [number, number]],
  ): Promise<SessionPayload> {
    return this.sessionRequest("rotate", session, { line });
  }

  async selectFeature(session: string, id: number): Promise<number> {
    const reply = await this.request("select_feature", session, { id });
    return reply.current_feature as number;
  }

  async setSelection(
    session: string,
    items: [string, number][],
  ): Promise<[string, number][]> {
    const reply = await this.request("set_selection", session, { items });
    return reply.selection as [string, number][];
  }

  async featureColors(session: string, id: number): Promise<FeatureColors> {
    const reply = await this.request("feature_colors", session, { id });
    return reply as unknown as FeatureColors;
  }

  async featureStages(
    session: string,
    id: number,
    which: NetworkTag,
  ): Promise<number[][]> {
    const reply = await this.request("feature_stages", session, { id, which });
    return reply.stages as number[][];
  }

  async histogram(
    session: string,
    id: number,
    bins = 30,
  ): Promise<HistogramPayload> {
    const reply = await this.request("histogram", session, { id, bins });
    return reply as unknown as HistogramPayload;
  }
}
