/**
 * Lasso selection. Point-in-polygon is the one piece of analytics the
 * client computes itself; everything else renders service state.
 */

export type Point = [number, number];

/** Ray-casting point-in-polygon test. */
export function pointInPolygon(pt: Point, polygon: Point[]): boolean {
  const [x, y] = pt;
  let inside = false;
  for (let i = 0, j = polygon.length - 1; i < polygon.length; j = i++) {
    const [xi, yi] = polygon[i];
    const [xj, yj] = polygon[j];
    const crosses = yi > y !== yj > y
      && x < ((xj - xi) * (y - yi)) / (yj - yi) + xi;
    if (crosses) inside = !inside;
  }
  return inside;
}

/** Collects pointer positions into a polygon, then resolves hits. */
export class Lasso {
  private points: Point[] = [];
  active = false;

  start(pt: Point): void {
    this.points = [pt];
    this.active = true;
  }

  extend(pt: Point): void {
    if (this.active) this.points.push(pt);
  }

  /** Close the polygon and return indices of the points inside it. */
  finish(candidates: Point[]): number[] {
    this.active = false;
    if (this.points.length < 3) {
      this.points = [];
      return [];
    }
    const polygon = this.points;
    this.points = [];
    const hits: number[] = [];
    candidates.forEach((pt, i) => {
      if (pointInPolygon(pt, polygon)) hits.push(i);
    });
    return hits;
  }

  /** SVG path data for the in-progress outline. */
  pathData(): string {
    if (!this.points.length) return "";
    const [head, ...rest] = this.points;
    return `M${head[0]},${head[1]}` + rest.map(([x, y]) => `L${x},${y}`).join("");
  }
}
