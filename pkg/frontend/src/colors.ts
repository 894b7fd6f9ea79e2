/**
 * Fixed colormaps, named so rendered views stay comparable run to run.
 *
 * Node fills use a purple-to-yellow sequential ramp (viridis control
 * points); loadings use a brown-to-blue-green diverging ramp (BrBG
 * control points), negative loadings toward brown, positive toward
 * blue-green.
 */

type Rgb = [number, number, number];

const PURPLE_YELLOW: Rgb[] = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

const BROWN_BLUEGREEN: Rgb[] = [
  [84, 48, 5],
  [140, 81, 10],
  [191, 129, 45],
  [223, 194, 125],
  [245, 245, 245],
  [128, 205, 193],
  [53, 151, 143],
  [1, 102, 94],
  [0, 60, 48],
];

function ramp(stops: Rgb[], t: number): string {
  const x = Math.min(1, Math.max(0, t)) * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(x));
  const f = x - i;
  const mix = (a: number, b: number) => Math.round(a + (b - a) * f);
  const [r, g, b] = [0, 1, 2].map((c) => mix(stops[i][c], stops[i + 1][c]));
  return `rgb(${r},${g},${b})`;
}

/** Sequential fill for a value already scaled to [0, 1]. */
export function valueColor(t: number): string {
  return ramp(PURPLE_YELLOW, t);
}

/** Diverging fill for a scaled loading in [-1, 1]. */
export function loadingColor(v: number): string {
  return ramp(BROWN_BLUEGREEN, (v + 1) / 2);
}

/** Border colors for the two networks, matched across all views. */
export const BORDER = { target: "#000000", background: "#9e9e9e" } as const;

/** Highlight hue for the selected heatmap row and selected nodes. */
export const HIGHLIGHT = "#ffd500";
