/** Heat matrix: one row per child region, one column per release.
 *
 * Rendering is a pure function of the fetched slice plus the shared
 * scale; every cell carries its number in data-value so the view can be
 * audited against the response it was built from.
 */

import type { Scale } from "./scales.js";
import { NULL_COLOR } from "./scales.js";
import type { MatrixSlice } from "./types.js";

export interface MatrixHandlers {
  onSort(release: string): void;
  onDrill(name: string): void;
  onToggleRow(name: string): void;
}

export function formatCell(value: number | null, mode: string): string {
  if (value === null) return "";
  if (mode === "delta") return `${(value * 100).toFixed(1)}%`;
  const abs = Math.abs(value);
  if (abs >= 1000) return Math.round(value).toLocaleString("en-US");
  if (Number.isInteger(value)) return String(value);
  return value.toPrecision(4);
}

export class MatrixView {
  constructor(
    private readonly container: HTMLElement,
    private readonly handlers: MatrixHandlers,
  ) {}

  render(slice: MatrixSlice, scale: Scale, selected: string[]): void {
    const doc = this.container.ownerDocument;
    const table = doc.createElement("table");
    table.className = "matrix";

    const head = table.createTHead().insertRow();
    head.appendChild(doc.createElement("th"));
    for (const release of slice.releases) {
      const th = doc.createElement("th");
      th.textContent = release;
      th.dataset.release = release;
      if (slice.sort === release) th.classList.add("sorted");
      th.addEventListener("click", () => this.handlers.onSort(release));
      head.appendChild(th);
    }

    const body = table.createTBody();
    slice.rows.forEach((name, i) => {
      const tr = body.insertRow();
      tr.dataset.name = name;
      if (selected.includes(name)) tr.classList.add("selected");

      const label = doc.createElement("th");
      label.className = "row-label";
      label.textContent = name;
      label.addEventListener("click", () => this.handlers.onDrill(name));
      tr.appendChild(label);

      const pick = doc.createElement("button");
      pick.className = "row-pick";
      pick.title = "toggle in line chart";
      pick.addEventListener("click", (ev) => {
        ev.stopPropagation();
        this.handlers.onToggleRow(name);
      });
      label.appendChild(pick);

      slice.releases.forEach((release, j) => {
        const cell = slice.cells[i][j];
        const td = tr.insertCell();
        td.dataset.name = name;
        td.dataset.release = release;
        td.dataset.value = String(cell);
        const bucket = scale.bucket(cell);
        if (cell === null) {
          td.classList.add("cell-null");
          td.style.background = NULL_COLOR;
        } else {
          td.dataset.bucket = String(bucket);
          td.style.background = scale.color(cell);
          td.title = `${name} @ ${release}: ${cell}`;
        }
        td.textContent = formatCell(cell, slice.mode);
      });
    });

    this.container.replaceChildren(table);
  }
}
