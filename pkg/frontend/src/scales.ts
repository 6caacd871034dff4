/** Color scales shared by the heat matrix and the map.
 *
 * One Scale instance is built per fetched matrix and handed to both views,
 * so a region's map color and its matrix cell can only disagree if they
 * were given different numbers. Buckets are discrete: equal bucket index
 * means equal color.
 */

import type { MatrixMode } from "./types.js";

/** Cells and regions with no value are always this gray. */
export const NULL_COLOR = "#cfcfcf";

// light -> dark sequential ramp for plain values
const SEQUENTIAL = [
  "#f7fbff", "#deebf7", "#c6dbef", "#9ecae1", "#6baed6",
  "#4292c6", "#2171b5", "#08519c", "#08306b",
];

// blue -> white -> red diverging ramp for deltas, centered on zero
const DIVERGING = [
  "#2166ac", "#4393c3", "#92c5de", "#d1e5f0", "#f7f7f7",
  "#fddbc7", "#f4a582", "#d6604d", "#b2182b",
];

export interface Scale {
  readonly mode: MatrixMode;
  bucket(value: number | null): number | null;
  color(value: number | null): string;
}

export function makeScale(mode: MatrixMode, values: (number | null)[]): Scale {
  const present = values.filter((v): v is number => v !== null && Number.isFinite(v));
  const palette = mode === "delta" ? DIVERGING : SEQUENTIAL;
  const n = palette.length;

  let lo = 0;
  let hi = 1;
  if (mode === "delta") {
    // symmetric around zero so the white midpoint means "no change"
    const m = present.length ? Math.max(...present.map(Math.abs)) : 0;
    lo = -m;
    hi = m;
  } else if (present.length) {
    lo = Math.min(...present);
    hi = Math.max(...present);
  }

  const bucket = (value: number | null): number | null => {
    if (value === null || !Number.isFinite(value)) return null;
    if (hi === lo) return Math.floor(n / 2);
    const t = (value - lo) / (hi - lo);
    return Math.max(0, Math.min(n - 1, Math.floor(t * n)));
  };

  return {
    mode,
    bucket,
    color(value) {
      const b = bucket(value);
      return b === null ? NULL_COLOR : palette[b];
    },
  };
}

/** Fixed line colors, assigned by selection order. */
export const SERIES_COLORS = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

export function seriesColor(index: number): string {
  return SERIES_COLORS[index % SERIES_COLORS.length];
}
