/**
 * Feature contribution view: one row per learned definition, each row a
 * glyph spelling out how the feature is computed plus heatmap cells for
 * its scaled loadings.
 *
 * Glyph grammar: the base measure is a gray rectangle, every relational
 * operator an ellipse, laid out left to right in computation order with
 * the neighbor direction written under the connecting arrow. Loadings use
 * the brown-to-blue-green diverging ramp over [-1, 1]. The selected row
 * (by default the strongest |loading| on cPC1) is highlighted in yellow;
 * clicking a row selects its feature everywhere, hovering a glyph element
 * reports the stage under the cursor so other views can recolor.
 */

import { HIGHLIGHT, loadingColor } from "./colors.js";
import type { DefinitionJson, SessionPayload } from "./protocol.js";
import type { Store } from "./state.js";
import { el, svgEl } from "./util.js";

const BOX_W = 68;
const BOX_H = 26;
const GAP = 34;
const ROW_H = 46;

export interface GlyphHover {
  id: number;
  stage: number;
}

/** Build the standalone glyph for one definition. */
export function buildGlyph(def: DefinitionJson): SVGSVGElement {
  const steps = def.chain.length;
  const width = BOX_W + steps * (BOX_W + GAP) + 8;
  const svg = svgEl("svg", {
    width,
    height: ROW_H,
    class: "nc-glyph",
    "data-definition": def.id,
  });

  const cy = ROW_H / 2;
  svgEl("rect", {
    x: 2,
    y: cy - BOX_H / 2,
    width: BOX_W,
    height: BOX_H,
    rx: 3,
    fill: "#d9d9d9",
    stroke: "#666666",
    class: "nc-glyph-base",
    "data-stage": 0,
  }, svg);
  text(svg, 2 + BOX_W / 2, cy, def.base, "nc-glyph-label");

  def.chain.forEach((op, i) => {
    const x0 = 2 + BOX_W + i * (BOX_W + GAP);
    const cx = x0 + GAP + BOX_W / 2;
    svgEl("line", {
      x1: x0 + 2,
      y1: cy,
      x2: x0 + GAP - 4,
      y2: cy,
      stroke: "#666666",
      "marker-end": "url(#nc-arrow)",
    }, svg);
    text(svg, x0 + GAP / 2, cy + BOX_H / 2 + 8, op.direction, "nc-direction");
    svgEl("ellipse", {
      cx,
      cy,
      rx: BOX_W / 2,
      ry: BOX_H / 2,
      fill: "#ffffff",
      stroke: "#666666",
      class: "nc-glyph-op",
      "data-stage": i + 1,
    }, svg);
    text(svg, cx, cy, op.summary, "nc-glyph-label");
  });
  return svg;
}

function text(
  parent: SVGElement,
  x: number,
  y: number,
  content: string,
  className: string,
): void {
  const node = svgEl("text", {
    x,
    y,
    class: className,
    "text-anchor": "middle",
    "dominant-baseline": "middle",
  }, parent);
  node.textContent = content;
}

export class FeatureContributionView {
  readonly root: HTMLElement;

  constructor(
    parent: HTMLElement,
    private store: Store,
    private onSelect: (id: number) => void,
    private onStageHover: (hover: GlyphHover | null) => void,
  ) {
    this.root = el("div", "nc-features", parent);
  }

  render(): void {
    const snap = this.store.state.snapshot;
    if (!snap) return;
    this.root.replaceChildren();
    for (const def of snap.definitions) {
      this.root.appendChild(this.row(snap, def));
    }
  }

  private row(snap: SessionPayload, def: DefinitionJson): HTMLElement {
    const row = el("div", "nc-feature-row");
    row.dataset.definition = String(def.id);
    if (def.id === snap.current_feature) {
      row.classList.add("nc-feature-selected");
      row.style.background = HIGHLIGHT;
    }
    row.addEventListener("click", () => this.onSelect(def.id));

    const glyph = buildGlyph(def);
    for (const elem of glyph.querySelectorAll("[data-stage]")) {
      const stage = Number((elem as SVGElement).dataset.stage);
      elem.addEventListener("mouseenter", () =>
        this.onStageHover({ id: def.id, stage }));
      elem.addEventListener("mouseleave", () => this.onStageHover(null));
    }
    row.appendChild(glyph);

    const loadings = snap.model.scaled_loadings[def.id] ?? [];
    const cells = el("span", "nc-loading-cells", row);
    loadings.forEach((v, axis) => {
      const cell = el("span", "nc-loading-cell", cells);
      cell.style.background = loadingColor(v);
      cell.title = `${snap.embedding.axis_labels[axis]}: ${v.toFixed(3)}`;
      cell.dataset.loading = v.toFixed(6);
    });
    return row;
  }
}
