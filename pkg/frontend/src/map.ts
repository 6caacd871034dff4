/** Choropleth of the current node's children.
 *
 * Shapes come from the geometries endpoint; the fill for each region is
 * computed from the SAME matrix slice the heat matrix rendered, through
 * the same scale, at the release picked for the map. Regions the server
 * returned no value for are gray. Projected outlines are cached per
 * (path, release, kind, skip, snapshot) so panning between releases does
 * not re-project every polygon.
 */

import type { Scale } from "./scales.js";
import { NULL_COLOR } from "./scales.js";
import type { GeoFeature } from "./types.js";

const W = 420;
const H = 300;
const SVG_NS = "http://www.w3.org/2000/svg";

interface Outline {
  name: string;
  d: string;
}

function ringsOf(feature: GeoFeature): number[][][] {
  const geom = feature.geometry;
  if (geom.type === "Polygon") return geom.coordinates as number[][][];
  const parts = geom.coordinates as number[][][][];
  return parts.flat();
}

function project(features: GeoFeature[]): Outline[] {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const f of features) {
    for (const ring of ringsOf(f)) {
      for (const [px, py] of ring) {
        minX = Math.min(minX, px);
        maxX = Math.max(maxX, px);
        minY = Math.min(minY, py);
        maxY = Math.max(maxY, py);
      }
    }
  }
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const k = Math.min((W - 8) / spanX, (H - 8) / spanY);
  const sx = (px: number) => 4 + (px - minX) * k;
  // flip: geo y grows north, svg y grows down
  const sy = (py: number) => H - 4 - (py - minY) * k;

  return features.map((f) => ({
    name: f.name,
    d: ringsOf(f)
      .map(
        (ring) =>
          "M" + ring.map(([px, py]) => `${sx(px).toFixed(2)},${sy(py).toFixed(2)}`).join("L") + "Z",
      )
      .join(""),
  }));
}

export class MapView {
  private readonly outlines = new Map<string, Outline[]>();

  constructor(
    private readonly container: HTMLElement,
    private readonly onPick?: (name: string) => void,
  ) {}

  render(
    cacheKey: string,
    features: GeoFeature[],
    valueOf: (name: string) => number | null,
    scale: Scale,
  ): void {
    let outlines = this.outlines.get(cacheKey);
    if (!outlines) {
      outlines = project(features);
      this.outlines.set(cacheKey, outlines);
    }

    const doc = this.container.ownerDocument;
    const svg = doc.createElementNS(SVG_NS, "svg");
    svg.setAttribute("width", String(W));
    svg.setAttribute("height", String(H));
    svg.setAttribute("class", "map");

    for (const outline of outlines) {
      const value = valueOf(outline.name);
      const el = doc.createElementNS(SVG_NS, "path");
      el.setAttribute("d", outline.d);
      el.setAttribute("data-name", outline.name);
      el.setAttribute("data-value", String(value));
      const bucket = scale.bucket(value);
      if (bucket !== null) el.setAttribute("data-bucket", String(bucket));
      el.setAttribute("fill", value === null ? NULL_COLOR : scale.color(value));
      el.setAttribute("stroke", "#555");
      el.setAttribute("stroke-width", "0.6");

      const tip = doc.createElementNS(SVG_NS, "title");
      tip.textContent = value === null ? outline.name : `${outline.name}: ${value}`;
      el.appendChild(tip);

      if (this.onPick) {
        el.addEventListener("click", () => this.onPick!(outline.name));
      }
      svg.appendChild(el);
    }

    this.container.replaceChildren(svg);
  }
}
