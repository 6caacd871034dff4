/** Filter builder: a histogram of one attribute with a brushable range,
 * plus chips for the constraints gathered so far. Chips combine with
 * AND/OR and can be negated before the whole tree is applied server-side.
 */

import type { Histogram } from "./types.js";
import type { FilterNode } from "./types.js";

const W = 360;
const H = 120;
const PAD = 10;
const SVG_NS = "http://www.w3.org/2000/svg";

export interface Chip {
  leaf: FilterNode;
  negated: boolean;
  label: string;
}

export function buildExpression(chips: Chip[], combiner: "and" | "or"): FilterNode | null {
  const parts = chips.map((c) =>
    c.negated ? ({ op: "not", children: [c.leaf] } as FilterNode) : c.leaf,
  );
  if (parts.length === 0) return null;
  if (parts.length === 1) return parts[0];
  return { op: combiner, children: parts };
}

export interface FilterHandlers {
  onApply(expression: FilterNode | null): void;
  onAttribute(name: string): void;
}

export class FilterPanel {
  chips: Chip[] = [];
  combiner: "and" | "or" = "and";
  private hist: Histogram | null = null;
  private brushing: { x0: number } | null = null;
  private pending: [number, number] | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly attributes: string[],
    private readonly handlers: FilterHandlers,
  ) {}

  /** Snap a pixel offset inside the plot to the nearest bin edge value. */
  private pxToEdge(px: number): number {
    const edges = this.hist!.edges;
    const t = Math.max(0, Math.min(1, (px - PAD) / (W - 2 * PAD)));
    const raw = edges[0] + t * (edges[edges.length - 1] - edges[0]);
    let best = edges[0];
    for (const e of edges) {
      if (Math.abs(e - raw) < Math.abs(best - raw)) best = e;
    }
    return best;
  }

  /** Programmatic equivalent of dragging from value a to value b. */
  brushRange(a: number, b: number): void {
    if (!this.hist || this.hist.edges.length === 0) return;
    const lo = Math.min(a, b);
    const hi = Math.max(a, b);
    this.pending = [lo, hi];
    this.render();
  }

  addPendingChip(): void {
    if (!this.pending || !this.hist) return;
    const [lo, hi] = this.pending;
    this.chips.push({
      leaf: { op: "range", attr: this.hist.attribute, value: [lo, hi] },
      negated: false,
      label: `${this.hist.attribute} in [${lo}, ${hi}]`,
    });
    this.pending = null;
    this.render();
  }

  setHistogram(hist: Histogram): void {
    this.hist = hist;
    this.pending = null;
    this.render();
  }

  expression(): FilterNode | null {
    return buildExpression(this.chips, this.combiner);
  }

  render(): void {
    const doc = this.container.ownerDocument;
    const root = doc.createElement("div");
    root.className = "filter-panel";

    const select = doc.createElement("select");
    select.className = "filter-attr";
    for (const name of this.attributes) {
      const opt = doc.createElement("option");
      opt.value = name;
      opt.textContent = name;
      if (this.hist && this.hist.attribute === name) opt.selected = true;
      select.appendChild(opt);
    }
    select.addEventListener("change", () => this.handlers.onAttribute(select.value));
    root.appendChild(select);

    if (this.hist && this.hist.edges.length > 0) {
      root.appendChild(this.renderHistogram(doc));
    }

    if (this.pending) {
      const confirm = doc.createElement("button");
      confirm.className = "brush-confirm";
      confirm.textContent = `add ${this.hist!.attribute} in [${this.pending[0]}, ${this.pending[1]}]`;
      confirm.addEventListener("click", () => this.addPendingChip());
      root.appendChild(confirm);
    }

    const chipRow = doc.createElement("div");
    chipRow.className = "chips";
    this.chips.forEach((chip, i) => {
      const el = doc.createElement("span");
      el.className = "chip" + (chip.negated ? " negated" : "");
      el.textContent = (chip.negated ? "NOT " : "") + chip.label;

      const negate = doc.createElement("button");
      negate.className = "chip-not";
      negate.textContent = "!";
      negate.addEventListener("click", () => {
        chip.negated = !chip.negated;
        this.render();
      });
      el.appendChild(negate);

      const remove = doc.createElement("button");
      remove.className = "chip-remove";
      remove.textContent = "x";
      remove.addEventListener("click", () => {
        this.chips.splice(i, 1);
        this.render();
      });
      el.appendChild(remove);
      chipRow.appendChild(el);
    });
    root.appendChild(chipRow);

    const combine = doc.createElement("select");
    combine.className = "combiner";
    for (const op of ["and", "or"] as const) {
      const opt = doc.createElement("option");
      opt.value = op;
      opt.textContent = op.toUpperCase();
      if (this.combiner === op) opt.selected = true;
      combine.appendChild(opt);
    }
    combine.addEventListener("change", () => {
      this.combiner = combine.value as "and" | "or";
    });
    root.appendChild(combine);

    const apply = doc.createElement("button");
    apply.className = "filter-apply";
    apply.textContent = "apply";
    apply.addEventListener("click", () => this.handlers.onApply(this.expression()));
    root.appendChild(apply);

    const clear = doc.createElement("button");
    clear.className = "filter-clear";
    clear.textContent = "clear";
    clear.addEventListener("click", () => {
      this.chips = [];
      this.pending = null;
      this.render();
      this.handlers.onApply(null);
    });
    root.appendChild(clear);

    this.container.replaceChildren(root);
  }

  private renderHistogram(doc: Document): SVGSVGElement {
    const hist = this.hist!;
    const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    svg.setAttribute("width", String(W));
    svg.setAttribute("height", String(H));
    svg.setAttribute("class", "filter-hist");

    const peak = Math.max(...hist.counts, 1);
    const bins = hist.counts.length;
    const bw = (W - 2 * PAD) / bins;
    hist.counts.forEach((count, i) => {
      const bar = doc.createElementNS(SVG_NS, "rect");
      const h = ((H - 2 * PAD) * count) / peak;
      bar.setAttribute("x", String(PAD + i * bw));
      bar.setAttribute("y", String(H - PAD - h));
      bar.setAttribute("width", String(Math.max(bw - 1, 1)));
      bar.setAttribute("height", String(h));
      bar.setAttribute("fill", "#74a9cf");
      bar.setAttribute("data-count", String(count));
      svg.appendChild(bar);
    });

    if (this.pending) {
      const [lo, hi] = this.pending;
      const span = hist.edges[hist.edges.length - 1] - hist.edges[0] || 1;
      const x0 = PAD + ((lo - hist.edges[0]) / span) * (W - 2 * PAD);
      const x1 = PAD + ((hi - hist.edges[0]) / span) * (W - 2 * PAD);
      const sel = doc.createElementNS(SVG_NS, "rect");
      sel.setAttribute("class", "brush");
      sel.setAttribute("x", String(x0));
      sel.setAttribute("y", String(PAD / 2));
      sel.setAttribute("width", String(Math.max(x1 - x0, 0)));
      sel.setAttribute("height", String(H - PAD * 1.5));
      sel.setAttribute("fill", "rgba(30, 90, 160, 0.25)");
      svg.appendChild(sel);
    }

    // drag anywhere on the plot to sweep out a range; jsdom reports a
    // zero-origin bounding box, so clientX doubles as the local offset
    const localX = (ev: MouseEvent) => ev.clientX - svg.getBoundingClientRect().left;
    svg.addEventListener("mousedown", (ev) => {
      this.brushing = { x0: localX(ev as MouseEvent) };
    });
    svg.addEventListener("mousemove", (ev) => {
      if (!this.brushing) return;
      const a = this.pxToEdge(this.brushing.x0);
      const b = this.pxToEdge(localX(ev as MouseEvent));
      this.pending = [Math.min(a, b), Math.max(a, b)];
    });
    svg.addEventListener("mouseup", (ev) => {
      if (!this.brushing) return;
      const a = this.pxToEdge(this.brushing.x0);
      const b = this.pxToEdge(localX(ev as MouseEvent));
      this.brushing = null;
      this.brushRange(a, b);
    });

    return svg;
  }
}
