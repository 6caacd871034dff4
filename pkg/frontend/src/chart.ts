/** Line chart over releases for the selected rows.
 *
 * Null points break the line: a lot absent from a release, or a delta
 * with no defined predecessor, leaves a gap instead of an interpolated
 * segment that would fabricate a value.
 */

import { seriesColor } from "./scales.js";
import type { SeriesSlice } from "./types.js";

const W = 420;
const H = 180;
const PAD = 28;
const SVG_NS = "http://www.w3.org/2000/svg";

export class ChartView {
  constructor(private readonly container: HTMLElement) {}

  render(slices: SeriesSlice[], releases: string[]): void {
    const doc = this.container.ownerDocument;
    const svg = doc.createElementNS(SVG_NS, "svg");
    svg.setAttribute("width", String(W));
    svg.setAttribute("height", String(H));
    svg.setAttribute("class", "chart");

    const axes = doc.createElementNS(SVG_NS, "path");
    axes.setAttribute("class", "axes");
    axes.setAttribute(
      "d",
      `M ${PAD} ${PAD / 2} V ${H - PAD} H ${W - PAD / 2}`,
    );
    axes.setAttribute("fill", "none");
    axes.setAttribute("stroke", "#888");
    svg.appendChild(axes);

    const values: number[] = [];
    for (const slice of slices) {
      for (const [, v] of slice.points) if (v !== null) values.push(v);
    }
    const lo = values.length ? Math.min(...values, 0) : 0;
    const hi = values.length ? Math.max(...values) : 1;
    const span = hi === lo ? 1 : hi - lo;

    const x = (j: number) =>
      PAD + (releases.length <= 1 ? 0 : (j * (W - PAD * 1.5)) / (releases.length - 1));
    const y = (v: number) => H - PAD - ((v - lo) / span) * (H - PAD * 1.5);

    slices.forEach((slice, s) => {
      const color = seriesColor(s);
      const group = doc.createElementNS(SVG_NS, "g");
      group.setAttribute("data-name", slice.name);

      // split the polyline at nulls rather than bridging the gap
      let run: string[] = [];
      const flush = () => {
        if (run.length > 1) {
          const line = doc.createElementNS(SVG_NS, "polyline");
          line.setAttribute("points", run.join(" "));
          line.setAttribute("fill", "none");
          line.setAttribute("stroke", color);
          line.setAttribute("stroke-width", "2");
          group.appendChild(line);
        }
        run = [];
      };
      slice.points.forEach(([release, value], j) => {
        if (value === null) {
          flush();
          return;
        }
        run.push(`${x(j)},${y(value)}`);
        const dot = doc.createElementNS(SVG_NS, "circle");
        dot.setAttribute("cx", String(x(j)));
        dot.setAttribute("cy", String(y(value)));
        dot.setAttribute("r", "3");
        dot.setAttribute("fill", color);
        dot.setAttribute("data-name", slice.name);
        dot.setAttribute("data-release", release);
        dot.setAttribute("data-value", String(value));
        group.appendChild(dot);
      });
      flush();
      svg.appendChild(group);
    });

    const legend = doc.createElement("div");
    legend.className = "legend";
    slices.forEach((slice, s) => {
      const item = doc.createElement("span");
      item.textContent = slice.name;
      item.style.color = seriesColor(s);
      legend.appendChild(item);
    });

    this.container.replaceChildren(svg, legend);
  }
}
