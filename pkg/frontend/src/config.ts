/** Configuration panel: what to aggregate, how, and over which geography. */

import type { ExplorationState } from "./state.js";
import type { AggregateFn, MatrixMode, Meta } from "./types.js";

const LOT_COUNT = "(lot count)";

export interface ConfigHandlers {
  onChange(patch: Partial<ExplorationState>): void;
}

export class ConfigPanel {
  constructor(
    private readonly container: HTMLElement,
    private readonly meta: Meta,
    private readonly handlers: ConfigHandlers,
  ) {}

  render(state: ExplorationState): void {
    const doc = this.container.ownerDocument;
    const root = doc.createElement("div");
    root.className = "config-panel";

    const numeric = this.meta.attributes
      .filter((a) => a.kind !== "categorical")
      .map((a) => a.name);

    const attr = this.labeled(doc, root, "attribute");
    for (const name of [LOT_COUNT, ...numeric]) {
      const opt = doc.createElement("option");
      opt.value = name;
      opt.textContent = name;
      opt.selected = name === (state.attribute ?? LOT_COUNT);
      attr.appendChild(opt);
    }
    attr.className = "cfg-attribute";
    attr.addEventListener("change", () => {
      const value = attr.value === LOT_COUNT ? null : attr.value;
      this.handlers.onChange(value === null ? { attribute: null, fn: "count" } : { attribute: value });
    });

    const fn = this.labeled(doc, root, "aggregate");
    fn.className = "cfg-fn";
    for (const name of this.meta.aggregates) {
      const opt = doc.createElement("option");
      opt.value = name;
      opt.textContent = name;
      opt.selected = name === state.fn;
      fn.appendChild(opt);
    }
    fn.disabled = state.attribute === null;
    fn.addEventListener("change", () => this.handlers.onChange({ fn: fn.value as AggregateFn }));

    const mode = this.labeled(doc, root, "matrix mode");
    mode.className = "cfg-mode";
    for (const name of ["value", "delta"] as const) {
      const opt = doc.createElement("option");
      opt.value = name;
      opt.textContent = name;
      opt.selected = name === state.matrixMode;
      mode.appendChild(opt);
    }
    mode.addEventListener("change", () =>
      this.handlers.onChange({ matrixMode: mode.value as MatrixMode }),
    );

    const rel = this.labeled(doc, root, "map release");
    rel.className = "cfg-release";
    for (const name of this.meta.releases) {
      const opt = doc.createElement("option");
      opt.value = name;
      opt.textContent = name;
      opt.selected = name === state.mapRelease;
      rel.appendChild(opt);
    }
    rel.addEventListener("change", () => this.handlers.onChange({ mapRelease: rel.value }));

    const kind = this.labeled(doc, root, "regions");
    kind.className = "cfg-kind";
    for (const name of this.meta.region_kinds) {
      const opt = doc.createElement("option");
      opt.value = name;
      opt.textContent = name;
      opt.selected = name === state.regionKind;
      kind.appendChild(opt);
    }
    kind.addEventListener("change", () => this.handlers.onChange({ regionKind: kind.value }));

    const skipLabel = doc.createElement("label");
    skipLabel.className = "cfg-skip";
    const skip = doc.createElement("input");
    skip.type = "checkbox";
    skip.checked = state.skipBlocks;
    skip.addEventListener("change", () => this.handlers.onChange({ skipBlocks: skip.checked }));
    skipLabel.appendChild(skip);
    skipLabel.appendChild(doc.createTextNode(" skip block level"));
    root.appendChild(skipLabel);

    this.container.replaceChildren(root);
  }

  private labeled(doc: Document, root: HTMLElement, text: string): HTMLSelectElement {
    const label = doc.createElement("label");
    label.appendChild(doc.createTextNode(text + " "));
    const select = doc.createElement("select");
    label.appendChild(select);
    root.appendChild(label);
    return select;
  }
}
