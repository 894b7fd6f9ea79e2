/**
 * View invariants over a recorded pipeline payload: encodings, lasso
 * geometry, glyph structure, distribution scaling and control wiring.
 */

import { beforeEach, describe, expect, test } from "vitest";

import { BORDER, loadingColor, valueColor } from "../colors.js";
import { RefinementControls } from "../controls.js";
import { ProbabilityDistributionView } from "../distribution.js";
import { buildGlyph, FeatureContributionView, type GlyphHover } from "../glyphs.js";
import { NetworkLayoutViews } from "../layouts.js";
import { pointInPolygon, type Point } from "../lasso.js";
import type { NetworkTag, SessionClient } from "../protocol.js";
import { ContrastiveScatterplot } from "../scatterplot.js";
import { Store } from "../state.js";
import { pointer } from "./harness.js";
import { loadFixture } from "./stub.js";

const fixture = loadFixture();
const N_TARGET = fixture.run_pipeline.graphs.target.n;
const N_BACKGROUND = fixture.run_pipeline.graphs.background.n;

function seededStore(): Store {
  const store = new Store();
  store.update({
    sessionId: "s",
    snapshot: fixture.run_pipeline,
    colors: fixture.feature_colors,
    histogram: fixture.histogram,
  });
  return store;
}

describe("contrastive scatterplot", () => {
  let store: Store;
  let view: ContrastiveScatterplot;
  let lassoed: [NetworkTag, number][][];

  beforeEach(() => {
    store = seededStore();
    lassoed = [];
    view = new ContrastiveScatterplot(
      document.createElement("div"),
      store,
      (items) => lassoed.push(items),
    );
    store.subscribe(() => view.render());
    view.render();
  });

  test("draws every node of both networks with the stated encodings", () => {
    expect(view.points).toHaveLength(N_TARGET + N_BACKGROUND);
    const background = view.points.slice(0, N_BACKGROUND);
    const target = view.points.slice(N_BACKGROUND);
    // background first so target stays on top
    expect(background.every((p) => p.tag === "background")).toBe(true);
    expect(target.every((p) => p.tag === "target")).toBe(true);
    expect(new Set(target.map((p) => p.r))).toEqual(new Set([5]));
    expect(new Set(background.map((p) => p.r))).toEqual(new Set([3]));
    expect(target[0].border).toBe(BORDER.target);
    expect(background[0].border).toBe(BORDER.background);
    for (const p of view.points) {
      expect(p.x).toBeGreaterThanOrEqual(28 - 1e-9);
      expect(p.x).toBeLessThanOrEqual(480 - 28 + 1e-9);
      expect(p.y).toBeGreaterThanOrEqual(28 - 1e-9);
      expect(p.y).toBeLessThanOrEqual(360 - 28 + 1e-9);
    }
    expect(background[0].fill).toBe(valueColor(fixture.feature_colors.background[0]));
    expect(target[7].fill).toBe(valueColor(fixture.feature_colors.target[7]));
    expect(view.axisLabel.textContent).toBe("cPC1  /  cPC2");
  });

  test("legend hover dims the other network", () => {
    const entry = view.legend.querySelector(".nc-legend-target");
    pointer(entry!, "mouseenter", 0, 0);
    expect(view.points
      .filter((p) => p.tag === "background")
      .every((p) => p.dimmed)).toBe(true);
    expect(view.points
      .filter((p) => p.tag === "target")
      .some((p) => p.dimmed)).toBe(false);
    pointer(entry!, "mouseleave", 0, 0);
    expect(view.points.some((p) => p.dimmed)).toBe(false);
  });

  test("a degenerate model shows the no-contrast notice", () => {
    expect(view.notice.hidden).toBe(true);
    const snap = fixture.run_pipeline;
    store.update({
      snapshot: { ...snap, model: { ...snap.model, degenerate: true } },
    });
    expect(view.notice.hidden).toBe(false);
    expect(view.notice.textContent).toBe("no contrast found");
  });

  test("selection echo draws highlight rings", () => {
    store.update({ selection: [["target", 2], ["background", 5]] });
    const selected = view.points.filter((p) => p.selected);
    expect(selected.map((p) => [p.tag, p.index])).toEqual(
      expect.arrayContaining([["target", 2], ["background", 5]]));
    expect(selected).toHaveLength(2);
  });

  test("shift-drag lasso resolves the enclosed nodes", () => {
    const p0 = view.points[0];
    const box: Point[] = [
      [p0.x - 8, p0.y - 8],
      [p0.x + 8, p0.y - 8],
      [p0.x + 8, p0.y + 8],
      [p0.x - 8, p0.y + 8],
    ];
    const expected = view.points
      .filter((p) => pointInPolygon([p.x, p.y], box))
      .map((p): [NetworkTag, number] => [p.tag, p.index]);
    expect(expected.length).toBeGreaterThan(0);

    pointer(view.overlay, "pointerdown", box[0][0], box[0][1], { shiftKey: true });
    pointer(view.overlay, "pointermove", box[1][0], box[1][1]);
    pointer(view.overlay, "pointermove", box[2][0], box[2][1]);
    pointer(view.overlay, "pointermove", box[3][0], box[3][1]);
    pointer(view.overlay, "pointerup", box[3][0], box[3][1]);
    expect(lassoed).toEqual([expected]);
  });

  test("an empty lasso clears the selection", () => {
    pointer(view.overlay, "pointerdown", 1, 1, { shiftKey: true });
    pointer(view.overlay, "pointermove", 3, 1);
    pointer(view.overlay, "pointermove", 3, 3);
    pointer(view.overlay, "pointerup", 1, 3);
    expect(lassoed).toEqual([[]]);
  });

  test("wheel zooms and plain drag pans the camera", () => {
    const before = view.points.map((p) => p.x);
    view.overlay.dispatchEvent(new WheelEvent("wheel", { deltaY: -1 }));
    const zoomed = view.points.map((p) => p.x);
    expect(zoomed).not.toEqual(before);

    pointer(view.overlay, "pointerdown", 100, 100);
    pointer(view.overlay, "pointermove", 130, 110);
    pointer(view.overlay, "pointerup", 130, 110);
    expect(store.camera("scatter").panX).toBe(30);
    expect(store.camera("scatter").panY).toBe(10);
  });
});

describe("feature contribution view", () => {
  function build(): {
    view: FeatureContributionView;
    root: HTMLElement;
    selected: number[];
    hovered: (GlyphHover | null)[];
  } {
    const store = seededStore();
    const parent = document.createElement("div");
    const selected: number[] = [];
    const hovered: (GlyphHover | null)[] = [];
    const view = new FeatureContributionView(
      parent,
      store,
      (id) => selected.push(id),
      (hover) => hovered.push(hover),
    );
    view.render();
    return { view, root: view.root, selected, hovered };
  }

  test("one row per learned definition, current feature highlighted", () => {
    const { root } = build();
    const rows = root.querySelectorAll(".nc-feature-row");
    expect(rows).toHaveLength(fixture.run_pipeline.definitions.length);
    const highlighted = root.querySelectorAll(".nc-feature-selected");
    expect(highlighted).toHaveLength(1);
    expect((highlighted[0] as HTMLElement).dataset.definition)
      .toBe(String(fixture.run_pipeline.current_feature));
  });

  test("glyphs mirror each definition's operator chain", () => {
    const { root } = build();
    for (const def of fixture.run_pipeline.definitions) {
      const row = root.querySelector(`[data-definition="${def.id}"]`)!;
      expect(row.querySelectorAll("rect")).toHaveLength(1);
      expect(row.querySelectorAll("ellipse")).toHaveLength(def.chain.length);
    }
  });

  test("loading cells carry the scaled loadings per axis", () => {
    const { root } = build();
    const snap = fixture.run_pipeline;
    // probe element so the comparison survives css color normalization
    const probe = document.createElement("span");
    for (const def of snap.definitions) {
      const cells = root.querySelectorAll(
        `[data-definition="${def.id}"] .nc-loading-cell`);
      expect(cells).toHaveLength(2);
      snap.model.scaled_loadings[def.id].forEach((v, axis) => {
        const cell = cells[axis] as HTMLElement;
        expect(cell.dataset.loading).toBe(v.toFixed(6));
        probe.style.background = loadingColor(v);
        expect(cell.style.background).toBe(probe.style.background);
      });
    }
  });

  test("clicking a row selects its feature", () => {
    const { root, selected } = build();
    const row = root.querySelector('[data-definition="3"]')!;
    row.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(selected).toEqual([3]);
  });

  test("hovering a glyph stage reports definition and stage", () => {
    const { root, hovered } = build();
    const def = fixture.run_pipeline.definitions.find((d) => d.chain.length === 2)!;
    const row = root.querySelector(`[data-definition="${def.id}"]`)!;
    const stages = row.querySelectorAll("[data-stage]");
    expect(stages).toHaveLength(3);
    pointer(stages[2], "mouseenter", 0, 0);
    pointer(stages[2], "mouseleave", 0, 0);
    expect(hovered).toEqual([{ id: def.id, stage: 2 }, null]);
  });

  test("a base-only definition draws a single box", () => {
    const svg = buildGlyph({ id: 0, base: "k-core", chain: [] });
    expect(svg.querySelectorAll("rect")).toHaveLength(1);
    expect(svg.querySelectorAll("ellipse")).toHaveLength(0);
    expect(svg.querySelector("text")!.textContent).toBe("k-core");
  });
});

describe("probability distribution view", () => {
  test("draws one frequency polyline per network", () => {
    const store = seededStore();
    const view = new ProbabilityDistributionView(
      document.createElement("div"), store);
    view.render();
    const lines = view.svg.querySelectorAll("polyline");
    expect(lines).toHaveLength(2);
    expect(view.svg.querySelector(".nc-dist-target")!.getAttribute("stroke"))
      .toBe(BORDER.target);
    expect(view.svg.querySelector(".nc-dist-background")!.getAttribute("stroke"))
      .toBe(BORDER.background);
  });

  test("scale toggle re-renders the cached data with a log transform", () => {
    const store = seededStore();
    const view = new ProbabilityDistributionView(
      document.createElement("div"), store);
    view.render();
    const linear = view.svg.querySelector(".nc-dist-target")!.getAttribute("points");
    view.toggle.dispatchEvent(new MouseEvent("click"));
    expect(view.yScale).toBe("log");
    expect(view.toggle.textContent).toBe("linear scale");
    const log = view.svg.querySelector(".nc-dist-target")!.getAttribute("points");
    expect(log).not.toBe(linear);
    view.toggle.dispatchEvent(new MouseEvent("click"));
    expect(view.yScale).toBe("linear");
    expect(view.svg.querySelector(".nc-dist-target")!.getAttribute("points"))
      .toBe(linear);
  });
});

describe("network layout views", () => {
  function build(): {
    views: NetworkLayoutViews;
    store: Store;
    lassoed: [NetworkTag, number][][];
  } {
    const store = seededStore();
    const lassoed: [NetworkTag, number][][] = [];
    const views = new NetworkLayoutViews(
      document.createElement("div"), store, (items) => lassoed.push(items));
    views.render();
    return { views, store, lassoed };
  }

  test("each panel draws its network in the precomputed layout", () => {
    const { views } = build();
    expect(views.target.points).toHaveLength(N_TARGET);
    expect(views.background.points).toHaveLength(N_BACKGROUND);
    expect(views.target.points[0].fill)
      .toBe(valueColor(fixture.feature_colors.target[0]));
  });

  test("a lasso in a panel relays tagged node indices", () => {
    const { views, lassoed } = build();
    const p0 = views.target.points[0];
    const box: Point[] = [
      [p0.x - 6, p0.y - 6],
      [p0.x + 6, p0.y - 6],
      [p0.x + 6, p0.y + 6],
      [p0.x - 6, p0.y + 6],
    ];
    const expected = views.target.points
      .filter((p) => pointInPolygon([p.x, p.y], box))
      .map((p): [NetworkTag, number] => ["target", p.index]);
    expect(expected.length).toBeGreaterThan(0);

    const overlay = views.target.overlay;
    pointer(overlay, "pointerdown", box[0][0], box[0][1]);
    pointer(overlay, "pointermove", box[1][0], box[1][1]);
    pointer(overlay, "pointermove", box[2][0], box[2][1]);
    pointer(overlay, "pointerup", box[3][0], box[3][1]);
    expect(lassoed).toEqual([expected]);
  });

  test("hovered stage values recolor only the matching network", () => {
    const { views, store } = build();
    store.update({
      stageValues: { id: 8, stage: 1, values: Array(N_TARGET).fill(0.5) },
    });
    views.render();
    expect(views.target.points.every((p) => p.fill === valueColor(0.5)))
      .toBe(true);
    // stage values are target-sized, so the background keeps feature colors
    expect(views.background.points[0].fill)
      .toBe(valueColor(fixture.feature_colors.background[0]));
  });

  test("selection highlights stay within their network", () => {
    const { views, store } = build();
    store.update({ selection: [["target", 1], ["background", 1]] });
    views.render();
    expect(views.highlighted("target")).toEqual([1]);
    expect(views.highlighted("background")).toEqual([1]);
    expect(views.target.points[2].selected).toBe(false);
  });
});

describe("refinement controls", () => {
  function build(): {
    controls: RefinementControls;
    store: Store;
    calls: [string, number][];
  } {
    const store = seededStore();
    const calls: [string, number][] = [];
    const client = {
      setAlpha: (session: string, alpha: number) => calls.push([session, alpha]),
    } as unknown as SessionClient;
    const overlay = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    const controls = new RefinementControls(
      document.createElement("div"), store, client, overlay);
    controls.render();
    return { controls, store, calls };
  }

  test("slider spans the session alpha grid and tracks the model", () => {
    const { controls } = build();
    const grid = fixture.run_pipeline.config.alpha_grid;
    expect(controls.grid).toEqual(grid);
    expect(controls.slider.max).toBe(String(grid.length - 1));
    // recorded model sits at the top of the grid
    expect(controls.slider.value).toBe(String(grid.length - 1));
    expect(controls.alphaLabel.textContent).toContain("1000");
  });

  test("slider input sends the grid value at the chosen index", () => {
    const { controls, calls } = build();
    controls.slider.value = "3";
    controls.slider.dispatchEvent(new Event("input"));
    expect(calls).toEqual([["s", fixture.run_pipeline.config.alpha_grid[3]]]);
  });

  test("losing the connection disables steering", () => {
    const { controls, store } = build();
    expect(controls.slider.disabled).toBe(false);
    expect(controls.reconnect.hidden).toBe(true);
    store.update({ connection: "closed" });
    controls.render();
    expect(controls.slider.disabled).toBe(true);
    expect(controls.rotateButton.disabled).toBe(true);
    expect(controls.reconnect.hidden).toBe(false);
  });
});
