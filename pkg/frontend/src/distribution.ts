/**
 * Probability distribution view: relative frequency of the current
 * feature's scaled values, one line per network. Line colors match the
 * node border colors (black target, gray background). The y scale can
 * flip between linear and log without re-requesting data.
 */

import { BORDER } from "./colors.js";
import type { HistogramPayload } from "./protocol.js";
import type { Store } from "./state.js";
import { el, extent, scaleLinear, svgEl } from "./util.js";

const LOG_FLOOR = 1e-4;

export class ProbabilityDistributionView {
  readonly root: HTMLElement;
  readonly svg: SVGSVGElement;
  readonly toggle: HTMLButtonElement;
  yScale: "linear" | "log" = "linear";

  private width: number;
  private height: number;

  constructor(parent: HTMLElement, private store: Store, width = 320, height = 180) {
    this.width = width;
    this.height = height;
    this.root = el("div", "nc-distribution", parent);
    this.toggle = el("button", "nc-scale-toggle", this.root);
    this.toggle.textContent = "log scale";
    this.toggle.addEventListener("click", () => {
      this.yScale = this.yScale === "linear" ? "log" : "linear";
      this.toggle.textContent = this.yScale === "linear" ? "log scale" : "linear scale";
      this.render(); // same cached payload, new transform
    });
    this.svg = svgEl("svg", { width, height, class: "nc-distribution-svg" }, this.root);
  }

  render(): void {
    const hist = this.store.state.histogram;
    this.svg.replaceChildren();
    if (!hist) return;
    const xs = scaleLinear(
      extent([...hist.target, ...hist.background].map((p) => p[0])),
      [24, this.width - 8],
    );
    const toY = (f: number) =>
      this.yScale === "log" ? Math.log10(Math.max(f, LOG_FLOOR)) : f;
    const ys = scaleLinear(
      this.yScale === "log" ? [Math.log10(LOG_FLOOR), 0] : [0, this.maxFreq(hist)],
      [this.height - 18, 8],
    );
    for (const tag of ["target", "background"] as const) {
      const pts = hist[tag]
        .map(([c, f]) => `${xs(c)},${ys(toY(f))}`)
        .join(" ");
      svgEl("polyline", {
        points: pts,
        fill: "none",
        stroke: BORDER[tag],
        "stroke-width": tag === "target" ? 1.8 : 1.2,
        class: `nc-dist-line nc-dist-${tag}`,
      }, this.svg);
    }
  }

  private maxFreq(hist: HistogramPayload): number {
    let hi = 0;
    for (const [, f] of [...hist.target, ...hist.background]) {
      if (f > hi) hi = f;
    }
    return hi || 1;
  }
}
