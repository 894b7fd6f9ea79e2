/**
 * Contrastive representation view: one scatterplot holding both networks
 * in the shared embedding space.
 *
 * Encodings: target nodes are larger circles with black borders,
 * background nodes smaller with gray borders; fill is the purple-yellow
 * ramp over the current feature's scaled values. Wheel zooms, drag pans,
 * shift-drag draws a lasso that resolves to node ids client-side and is
 * sent as set_selection. Points are painted onto a canvas so 10k-node
 * sessions stay interactive; the DOM keeps only overlays.
 */

import { BORDER, HIGHLIGHT, valueColor } from "./colors.js";
import { Lasso, type Point } from "./lasso.js";
import type { NetworkTag, SessionPayload } from "./protocol.js";
import type { Store } from "./state.js";
import { el, extent, scaleLinear, svgEl } from "./util.js";

export interface ScatterplotOptions {
  /** Canvas size in CSS pixels. */
  width?: number;
  height?: number;
  /** Point radius for target nodes; background nodes take 0.6 of it. */
  pointRadius?: number;
}

export interface RenderedPoint {
  tag: NetworkTag;
  index: number;
  x: number;
  y: number;
  r: number;
  fill: string;
  border: string;
  dimmed: boolean;
  selected: boolean;
}

const MARGIN = 28;

export class ContrastiveScatterplot {
  readonly root: HTMLElement;
  readonly canvas: HTMLCanvasElement;
  readonly overlay: SVGSVGElement;
  readonly legend: HTMLElement;
  readonly notice: HTMLElement;
  readonly axisLabel: HTMLElement;

  /** What the last render painted; the test surface for a canvas view. */
  points: RenderedPoint[] = [];

  private width: number;
  private height: number;
  private radius: number;
  private lasso = new Lasso();
  private lassoPath: SVGPathElement;
  private dragging: "pan" | "lasso" | null = null;
  private last: Point = [0, 0];

  constructor(
    parent: HTMLElement,
    private store: Store,
    private onLasso: (items: [NetworkTag, number][]) => void,
    options: ScatterplotOptions = {},
  ) {
    this.width = options.width ?? 480;
    this.height = options.height ?? 360;
    this.radius = options.pointRadius ?? 5;

    this.root = el("div", "nc-scatterplot", parent);
    this.canvas = el("canvas", "nc-scatterplot-canvas", this.root);
    this.canvas.width = this.width;
    this.canvas.height = this.height;
    this.overlay = svgEl("svg", { width: this.width, height: this.height }, this.root);
    this.overlay.classList.add("nc-scatterplot-overlay");
    this.lassoPath = svgEl("path", { class: "nc-lasso", fill: "none" }, this.overlay);
    this.axisLabel = el("div", "nc-axis-labels", this.root);
    this.legend = el("div", "nc-legend", this.root);
    this.notice = el("div", "nc-notice", this.root);
    this.notice.hidden = true;

    this.buildLegend();
    this.bindPointer();
  }

  private buildLegend(): void {
    for (const tag of ["target", "background"] as const) {
      const entry = el("span", `nc-legend-entry nc-legend-${tag}`, this.legend);
      entry.textContent = tag;
      entry.addEventListener("mouseenter", () =>
        this.store.update({ legendHover: tag }));
      entry.addEventListener("mouseleave", () =>
        this.store.update({ legendHover: null }));
    }
  }

  private bindPointer(): void {
    this.overlay.addEventListener("pointerdown", (ev) => {
      if (this.store.state.rotationMode) return;
      const pt = this.local(ev);
      if (ev.shiftKey) {
        this.dragging = "lasso";
        this.lasso.start(pt);
      } else {
        this.dragging = "pan";
      }
      this.last = pt;
    });
    this.overlay.addEventListener("pointermove", (ev) => {
      if (!this.dragging) return;
      const pt = this.local(ev);
      if (this.dragging === "lasso") {
        this.lasso.extend(pt);
        this.lassoPath.setAttribute("d", this.lasso.pathData());
      } else {
        const cam = this.store.camera("scatter");
        cam.panX += pt[0] - this.last[0];
        cam.panY += pt[1] - this.last[1];
        this.last = pt;
        this.render();
      }
    });
    this.overlay.addEventListener("pointerup", (ev) => {
      if (this.dragging === "lasso") {
        this.lasso.extend(this.local(ev));
        this.finishLasso();
      }
      this.dragging = null;
    });
    this.overlay.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      const cam = this.store.camera("scatter");
      cam.zoom *= ev.deltaY < 0 ? 1.15 : 1 / 1.15;
      this.render();
    });
  }

  private local(ev: { clientX: number; clientY: number }): Point {
    const box = this.overlay.getBoundingClientRect();
    return [ev.clientX - box.left, ev.clientY - box.top];
  }

  private finishLasso(): void {
    const hits = this.lasso.finish(this.points.map((p) => [p.x, p.y]));
    this.lassoPath.setAttribute("d", "");
    // an empty lasso clears the selection
    this.onLasso(hits.map((i) => [this.points[i].tag, this.points[i].index]));
  }

  render(): void {
    const snap = this.store.state.snapshot;
    if (!snap) return;
    this.points = this.project(snap);
    this.axisLabel.textContent = snap.embedding.axis_labels.join("  /  ");
    this.notice.hidden = !snap.model.degenerate;
    if (snap.model.degenerate) this.notice.textContent = "no contrast found";
    this.paint();
  }

  private project(snap: SessionPayload): RenderedPoint[] {
    const coords = [
      ...snap.embedding.target,
      ...snap.embedding.background,
    ];
    const xs = scaleLinear(extent(coords.map((c) => c[0])),
      [MARGIN, this.width - MARGIN]);
    const ys = scaleLinear(extent(coords.map((c) => c[1])),
      [this.height - MARGIN, MARGIN]);
    const cam = this.store.camera("scatter");
    const colors = this.store.state.colors;
    const selected = new Set(
      this.store.state.selection.map(([tag, i]) => `${tag}:${i}`));
    const hover = this.store.state.legendHover;

    const place = (tag: NetworkTag, xy: number[][], values?: number[]) =>
      xy.map((c, index): RenderedPoint => ({
        tag,
        index,
        x: (xs(c[0]) + cam.panX - this.width / 2) * cam.zoom + this.width / 2,
        y: (ys(c[1]) + cam.panY - this.height / 2) * cam.zoom + this.height / 2,
        r: tag === "target" ? this.radius : this.radius * 0.6,
        fill: values ? valueColor(values[index]) : "rgb(128,128,128)",
        border: BORDER[tag],
        dimmed: hover !== null && hover !== tag,
        selected: selected.has(`${tag}:${index}`),
      }));

    return [
      ...place("background", snap.embedding.background,
        colors?.background ?? undefined),
      ...place("target", snap.embedding.target, colors?.target ?? undefined),
    ];
  }

  private paint(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return; // test environments have no raster backend
    ctx.clearRect(0, 0, this.width, this.height);
    for (const p of this.points) {
      ctx.globalAlpha = p.dimmed ? 0.15 : 1;
      ctx.beginPath();
      ctx.arc(p.x, p.y, p.r, 0, Math.PI * 2);
      ctx.fillStyle = p.fill;
      ctx.fill();
      ctx.lineWidth = p.selected ? 2.5 : 1;
      ctx.strokeStyle = p.selected ? HIGHLIGHT : p.border;
      ctx.stroke();
    }
    ctx.globalAlpha = 1;
  }
}
