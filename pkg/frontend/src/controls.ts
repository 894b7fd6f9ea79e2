/**
 * Refinement controls: the alpha slider and the rotation gesture.
 *
 * The slider moves over the service's alpha grid (index-valued, so the
 * geometric spacing of the grid maps to even slider steps). Input events
 * feed SessionClient.setAlpha, which coalesces them into at most one
 * in-flight refit; a fast drag therefore lands on exactly one final
 * state. The rotation gesture is a straight line drawn over the
 * scatterplot; its endpoints go to the service verbatim, which answers
 * with rotated axes labeled as such.
 */

import type { SessionClient } from "./protocol.js";
import type { Store } from "./state.js";
import { el, svgEl } from "./util.js";

export class RefinementControls {
  readonly root: HTMLElement;
  readonly slider: HTMLInputElement;
  readonly alphaLabel: HTMLElement;
  readonly rotateButton: HTMLButtonElement;
  readonly reconnect: HTMLButtonElement;

  /** Grid the slider indexes into; comes from the session config. */
  grid: number[] = [];

  constructor(
    parent: HTMLElement,
    private store: Store,
    private client: SessionClient,
    scatterOverlay: SVGSVGElement,
  ) {
    this.root = el("div", "nc-controls", parent);

    const sliderWrap = el("label", "nc-alpha", this.root);
    sliderWrap.append("α ");
    this.slider = el("input", "nc-alpha-slider", sliderWrap);
    this.slider.type = "range";
    this.slider.min = "0";
    this.slider.step = "1";
    this.alphaLabel = el("span", "nc-alpha-value", sliderWrap);
    this.slider.addEventListener("input", () => this.emitAlpha());

    this.rotateButton = el("button", "nc-rotate-toggle", this.root);
    this.rotateButton.textContent = "draw rotation line";
    this.rotateButton.addEventListener("click", () => {
      const rotating = !this.store.state.rotationMode;
      this.store.update({ rotationMode: rotating });
      this.rotateButton.classList.toggle("nc-active", rotating);
    });
    this.bindRotation(scatterOverlay);

    this.reconnect = el("button", "nc-reconnect", this.root);
    this.reconnect.textContent = "reconnect";
    this.reconnect.hidden = true;
  }

  /** Reflect the session's grid and current alpha in the slider. */
  render(): void {
    const snap = this.store.state.snapshot;
    if (!snap) return;
    this.grid = snap.config?.alpha_grid ?? this.grid;
    if (this.grid.length) {
      this.slider.max = String(this.grid.length - 1);
      const alpha = snap.model.alpha;
      let nearest = 0;
      this.grid.forEach((g, i) => {
        if (Math.abs(g - alpha) < Math.abs(this.grid[nearest] - alpha)) {
          nearest = i;
        }
      });
      this.slider.value = String(nearest);
    }
    this.alphaLabel.textContent = ` ${snap.model.alpha}`;

    const closed = this.store.state.connection === "closed";
    this.slider.disabled = closed;
    this.rotateButton.disabled = closed;
    this.reconnect.hidden = !closed;
  }

  private emitAlpha(): void {
    const session = this.store.state.sessionId;
    if (!session || !this.grid.length) return;
    const alpha = this.grid[Number(this.slider.value)];
    this.alphaLabel.textContent = ` ${alpha}`;
    this.client.setAlpha(session, alpha);
  }

  private bindRotation(overlay: SVGSVGElement): void {
    let start: [number, number] | null = null;
    let line: SVGLineElement | null = null;
    const local = (ev: { clientX: number; clientY: number }): [number, number] => {
      const box = overlay.getBoundingClientRect();
      return [ev.clientX - box.left, ev.clientY - box.top];
    };
    overlay.addEventListener("pointerdown", (ev) => {
      if (!this.store.state.rotationMode) return;
      start = local(ev);
      line = svgEl("line", {
        x1: start[0], y1: start[1], x2: start[0], y2: start[1],
        class: "nc-rotation-line", stroke: "#d33",
      }, overlay);
    });
    overlay.addEventListener("pointermove", (ev) => {
      if (!start || !line) return;
      const [x, y] = local(ev);
      line.setAttribute("x2", String(x));
      line.setAttribute("y2", String(y));
    });
    overlay.addEventListener("pointerup", (ev) => {
      if (!start || !line) return;
      const end = local(ev);
      line.remove();
      line = null;
      const session = this.store.state.sessionId;
      // screen y grows downward; flip so the gesture matches data space
      if (session) {
        void this.client.rotate(session, [
          [start[0], -start[1]],
          [end[0], -end[1]],
        ]);
      }
      start = null;
    });
  }
}
