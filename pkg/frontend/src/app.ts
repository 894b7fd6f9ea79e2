/**
 * Wires the four views and the controls to one session.
 *
 * The app is the only place that talks to the client; views render from
 * the store and hand interactions back up. Any session payload (pipeline
 * result, alpha update, rotation) goes through applySession, which also
 * refreshes the data that depends on the current feature.
 */

import { RefinementControls } from "./controls.js";
import { ProbabilityDistributionView } from "./distribution.js";
import { FeatureContributionView, type GlyphHover } from "./glyphs.js";
import { NetworkLayoutViews } from "./layouts.js";
import type {
  NetworkTag,
  ProgressEvent,
  SessionClient,
  SessionPayload,
  Transport,
} from "./protocol.js";
import { ContrastiveScatterplot } from "./scatterplot.js";
import { Store } from "./state.js";
import { el } from "./util.js";

export class App {
  readonly store = new Store();
  readonly scatter: ContrastiveScatterplot;
  readonly features: FeatureContributionView;
  readonly distribution: ProbabilityDistributionView;
  readonly layouts: NetworkLayoutViews;
  readonly controls: RefinementControls;
  readonly status: HTMLElement;

  constructor(
    root: HTMLElement,
    readonly client: SessionClient,
    transport?: Transport,
  ) {
    this.status = el("div", "nc-status", root);
    const main = el("div", "nc-main", root);

    const onLasso = (items: [NetworkTag, number][]) => {
      void this.applySelection(items);
    };
    this.scatter = new ContrastiveScatterplot(main, this.store, onLasso);
    this.features = new FeatureContributionView(
      main,
      this.store,
      (id) => void this.selectFeature(id),
      (hover) => void this.hoverStage(hover),
    );
    this.distribution = new ProbabilityDistributionView(main, this.store);
    this.layouts = new NetworkLayoutViews(main, this.store, onLasso);
    this.controls = new RefinementControls(
      root, this.store, client, this.scatter.overlay);

    client.onSession((payload) => this.applySession(payload));
    transport?.onStateChange((state) => this.store.update({ connection: state }));
    this.store.subscribe(() => this.renderAll());
  }

  /** Create a session for a dataset pair and run the pipeline. */
  async loadPair(
    target: string,
    background: string,
    config?: Record<string, unknown>,
  ): Promise<void> {
    const { session } = await this.client.createSession(
      target, background, config);
    this.store.update({ sessionId: session });
    await this.client.runPipeline(session, (ev) => this.progress(ev));
  }

  private progress(ev: ProgressEvent): void {
    this.status.textContent = `${ev.phase} ${(ev.fraction * 100).toFixed(0)}%`;
  }

  private async applySession(payload: SessionPayload): Promise<void> {
    const session = this.store.state.sessionId;
    this.store.update({
      snapshot: payload,
      selection: payload.selection,
      stageValues: null,
    });
    if (session) {
      const [colors, histogram] = await Promise.all([
        this.client.featureColors(session, payload.current_feature),
        this.client.histogram(session, payload.current_feature),
      ]);
      this.store.update({ colors, histogram });
    }
    this.status.textContent = (payload.notices ?? []).join("  ");
  }

  private async selectFeature(id: number): Promise<void> {
    const session = this.store.state.sessionId;
    const snap = this.store.state.snapshot;
    if (!session || !snap) return;
    const current = await this.client.selectFeature(session, id);
    const [colors, histogram] = await Promise.all([
      this.client.featureColors(session, current),
      this.client.histogram(session, current),
    ]);
    this.store.update({
      snapshot: { ...snap, current_feature: current },
      colors,
      histogram,
    });
  }

  private async hoverStage(hover: GlyphHover | null): Promise<void> {
    const session = this.store.state.sessionId;
    if (!hover || !session) {
      this.store.update({ stageValues: null });
      return;
    }
    const stages = await this.client.featureStages(session, hover.id, "target");
    this.store.update({
      stageValues: {
        id: hover.id,
        stage: hover.stage,
        values: stages[hover.stage] ?? [],
      },
    });
  }

  private async applySelection(items: [NetworkTag, number][]): Promise<void> {
    const session = this.store.state.sessionId;
    if (!session) return;
    // the service echo is the single source of truth for selection
    const echoed = await this.client.setSelection(session, items);
    this.store.update({ selection: echoed });
  }

  private renderAll(): void {
    this.scatter.render();
    this.features.render();
    this.distribution.render();
    this.layouts.render();
    this.controls.render();
  }
}

export function createApp(
  root: HTMLElement,
  client: SessionClient,
  transport?: Transport,
): App {
  return new App(root, client, transport);
}
