/**
 * Single source of truth for what the views draw.
 *
 * Everything derived (positions, colors, loadings) comes straight from
 * service payloads; the store only holds the latest payloads plus pure
 * view state (hover, camera, selection echo). Views subscribe and re-read
 * on every change.
 */

import type {
  FeatureColors,
  HistogramPayload,
  SessionPayload,
} from "./protocol.js";

export interface Camera {
  zoom: number;
  panX: number;
  panY: number;
}

export interface ViewState {
  sessionId: string | null;
  snapshot: SessionPayload | null;
  /** Colors for the current feature, keyed by definition id. */
  colors: FeatureColors | null;
  /** Per-stage colors for the hovered glyph element, if any. */
  stageValues: { id: number; stage: number; values: number[] } | null;
  histogram: HistogramPayload | null;
  /** Selection echoed by the service; ["target"|"background", index]. */
  selection: [string, number][];
  /** Network tag under the legend cursor; other network is dimmed. */
  legendHover: "target" | "background" | null;
  /** True while the pointer draws a rotation line instead of pan/lasso. */
  rotationMode: boolean;
  connection: "connecting" | "open" | "closed";
  cameras: Record<string, Camera>;
}

export type Listener = (state: ViewState) => void;

export class Store {
  readonly state: ViewState = {
    sessionId: null,
    snapshot: null,
    colors: null,
    stageValues: null,
    histogram: null,
    selection: [],
    legendHover: null,
    rotationMode: false,
    connection: "connecting",
    cameras: {},
  };

  private listeners: Listener[] = [];

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<ViewState>): void {
    Object.assign(this.state, patch);
    for (const listener of this.listeners) listener(this.state);
  }

  camera(view: string): Camera {
    return (this.state.cameras[view] ??= { zoom: 1, panX: 0, panY: 0 });
  }
}
