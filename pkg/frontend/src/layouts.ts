/**
 * Network layout views: two node-link panels, one per network, in the
 * precomputed force layout. Fills reuse the current feature's colors (or
 * a hovered glyph stage's), borders match the scatterplot, and a lasso in
 * either panel feeds the same service selection, which keeps every view
 * highlighting identical node ids.
 */

import { BORDER, HIGHLIGHT, valueColor } from "./colors.js";
import { Lasso, type Point } from "./lasso.js";
import type { NetworkTag } from "./protocol.js";
import type { Store } from "./state.js";
import { el, extent, scaleLinear, svgEl } from "./util.js";

export interface LayoutPoint {
  index: number;
  x: number;
  y: number;
  fill: string;
  selected: boolean;
}

const MARGIN = 16;

class LayoutPanel {
  readonly root: HTMLElement;
  readonly canvas: HTMLCanvasElement;
  readonly overlay: SVGSVGElement;
  points: LayoutPoint[] = [];

  private lasso = new Lasso();
  private lassoPath: SVGPathElement;

  constructor(
    parent: HTMLElement,
    readonly tag: NetworkTag,
    private store: Store,
    private onLasso: (tag: NetworkTag, indices: number[]) => void,
    private width = 300,
    private height = 260,
  ) {
    this.root = el("div", `nc-layout nc-layout-${tag}`, parent);
    const title = el("div", "nc-layout-title", this.root);
    title.textContent = tag;
    this.canvas = el("canvas", "nc-layout-canvas", this.root);
    this.canvas.width = width;
    this.canvas.height = height;
    this.overlay = svgEl("svg", { width, height }, this.root);
    this.overlay.classList.add("nc-layout-overlay");
    this.lassoPath = svgEl("path", { class: "nc-lasso", fill: "none" }, this.overlay);
    this.bindPointer();
  }

  private bindPointer(): void {
    let active = false;
    const local = (ev: { clientX: number; clientY: number }): Point => {
      const box = this.overlay.getBoundingClientRect();
      return [ev.clientX - box.left, ev.clientY - box.top];
    };
    this.overlay.addEventListener("pointerdown", (ev) => {
      active = true;
      this.lasso.start(local(ev));
    });
    this.overlay.addEventListener("pointermove", (ev) => {
      if (!active) return;
      this.lasso.extend(local(ev));
      this.lassoPath.setAttribute("d", this.lasso.pathData());
    });
    this.overlay.addEventListener("pointerup", (ev) => {
      if (!active) return;
      active = false;
      this.lasso.extend(local(ev));
      const hits = this.lasso.finish(this.points.map((p) => [p.x, p.y]));
      this.lassoPath.setAttribute("d", "");
      this.onLasso(this.tag, hits.map((i) => this.points[i].index));
    });
  }

  render(): void {
    const snap = this.store.state.snapshot;
    if (!snap) return;
    const layout = snap.layouts[this.tag];
    if (!layout.positions.length) {
      this.points = [];
      return;
    }
    const xs = scaleLinear(extent(layout.positions.map((c) => c[0])),
      [MARGIN, this.width - MARGIN]);
    const ys = scaleLinear(extent(layout.positions.map((c) => c[1])),
      [this.height - MARGIN, MARGIN]);

    const stage = this.store.state.stageValues;
    const colors = stage && stage.values.length === layout.positions.length
      ? stage.values
      : this.store.state.colors?.[this.tag];
    const selected = new Set(
      this.store.state.selection
        .filter(([tag]) => tag === this.tag)
        .map(([, i]) => i));

    this.points = layout.positions.map((c, index) => ({
      index,
      x: xs(c[0]),
      y: ys(c[1]),
      fill: colors ? valueColor(colors[index]) : "rgb(128,128,128)",
      selected: selected.has(index),
    }));
    this.paint(snap.graphs[this.tag].n);
  }

  private paint(n: number): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, this.width, this.height);
    const r = n > 1000 ? 1.6 : 4;
    for (const p of this.points) {
      ctx.beginPath();
      ctx.arc(p.x, p.y, p.selected ? r + 1.5 : r, 0, Math.PI * 2);
      ctx.fillStyle = p.fill;
      ctx.fill();
      ctx.lineWidth = p.selected ? 2.5 : 1;
      ctx.strokeStyle = p.selected ? HIGHLIGHT : BORDER[this.tag];
      ctx.stroke();
    }
  }
}

export class NetworkLayoutViews {
  readonly root: HTMLElement;
  readonly target: LayoutPanel;
  readonly background: LayoutPanel;

  constructor(
    parent: HTMLElement,
    store: Store,
    onLasso: (items: [NetworkTag, number][]) => void,
  ) {
    this.root = el("div", "nc-layouts", parent);
    const relay = (tag: NetworkTag, indices: number[]) =>
      onLasso(indices.map((i): [NetworkTag, number] => [tag, i]));
    this.target = new LayoutPanel(this.root, "target", store, relay);
    this.background = new LayoutPanel(this.root, "background", store, relay);
  }

  render(): void {
    this.target.render();
    this.background.render();
  }

  /** Node indices currently highlighted, for cross-view consistency checks. */
  highlighted(tag: NetworkTag): number[] {
    const panel = tag === "target" ? this.target : this.background;
    return panel.points.filter((p) => p.selected).map((p) => p.index);
  }
}
