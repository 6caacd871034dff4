/** Wires the store, the API client, and the five panels together.
 *
 * One refresh fetches the matrix in BOTH modes plus the child shapes,
 * then derives every panel from those responses: the heat matrix and the
 * choropleth read the slice for the configured mode through one shared
 * scale, and the line chart reads the complementary slice, so the three
 * views cannot drift apart. No number is computed client-side; the only
 * client-side step is selecting rows out of fetched slices.
 */

import { Api, ApiError } from "./api.js";
import { Breadcrumb } from "./breadcrumb.js";
import { ChartView } from "./chart.js";
import { ConfigPanel } from "./config.js";
import { FilterPanel } from "./filter.js";
import { MatrixView } from "./matrix.js";
import { MapView } from "./map.js";
import { makeScale } from "./scales.js";
import { seriesMode, Store } from "./state.js";
import type { ExplorationState } from "./state.js";
import type {
  FilterNode,
  GeometryList,
  MatrixSlice,
  Meta,
  SeriesSlice,
  Session,
} from "./types.js";

interface ViewData {
  display: MatrixSlice;
  complement: MatrixSlice;
  shapes: GeometryList;
  shapesKey: string;
  /** set when a childless leaf was re-fetched as one row of its parent */
  leaf: string | null;
}

function selectRows(slice: MatrixSlice, names: string[]): MatrixSlice {
  const keep = slice.rows
    .map((name, i) => [name, i] as const)
    .filter(([name]) => names.includes(name));
  return {
    ...slice,
    rows: keep.map(([name]) => name),
    cells: keep.map(([, i]) => slice.cells[i]),
  };
}

export class App {
  store!: Store;
  meta!: Meta;
  /** awaitable handle on the in-flight refresh, for tests and callers */
  refreshing: Promise<void> = Promise.resolve();
  lastError: string | null = null;

  private matrixView!: MatrixView;
  private chartView!: ChartView;
  private mapView!: MapView;
  private filterPanel!: FilterPanel;
  private configPanel!: ConfigPanel;
  private breadcrumb!: Breadcrumb;

  private panes!: Record<string, HTMLElement>;
  private aborter: AbortController | null = null;
  private filterPending = false;
  private snapshot = "base";

  constructor(
    private readonly root: HTMLElement,
    readonly api: Api,
  ) {}

  async init(): Promise<void> {
    this.meta = await this.api.meta();
    const session = await this.api.session();
    this.snapshot = session.snapshot;

    const numeric = this.meta.attributes.filter((a) => a.kind !== "categorical");
    const attribute =
      numeric.find((a) => a.name === "ASSESSTOTAL")?.name ?? numeric[0]?.name ?? null;

    this.store = new Store({
      path: [this.meta.city],
      attribute,
      fn: attribute === null ? "count" : "sum",
      matrixMode: "value",
      sort: "name",
      selected: [],
      mapRelease: this.meta.releases[this.meta.releases.length - 1],
      regionKind: session.region_kind,
      skipBlocks: session.skip_blocks,
      filter: null,
    });

    this.buildDom();
    this.store.subscribe(() => {
      this.renderChrome();
      this.refreshing = this.refresh();
    });
    this.renderChrome();
    this.refreshing = this.refresh();
    await this.refreshing;
    await this.loadHistogram(numeric[0]?.name ?? this.meta.attributes[0].name);
  }

  private buildDom(): void {
    const doc = this.root.ownerDocument;
    this.panes = {};
    for (const name of ["error", "breadcrumb", "config", "matrix", "chart", "map", "filter"]) {
      const el = doc.createElement("div");
      el.className = `pane pane-${name}`;
      this.panes[name] = el;
      this.root.appendChild(el);
    }

    this.breadcrumb = new Breadcrumb(this.panes.breadcrumb, (length) =>
      this.store.rollUp(length),
    );
    this.configPanel = new ConfigPanel(this.panes.config, this.meta, {
      onChange: (patch) => this.onConfig(patch),
    });
    this.matrixView = new MatrixView(this.panes.matrix, {
      onSort: (release) => this.store.update({ sort: release }),
      onDrill: (name) => this.store.drillDown(name),
      onToggleRow: (name) => this.store.toggleSelected(name),
    });
    this.chartView = new ChartView(this.panes.chart);
    this.mapView = new MapView(this.panes.map, (name) => this.store.drillDown(name));
    this.filterPanel = new FilterPanel(
      this.panes.filter,
      this.meta.attributes.filter((a) => a.kind !== "categorical").map((a) => a.name),
      {
        onApply: (expression) => void this.applyFilter(expression),
        onAttribute: (name) => void this.loadHistogram(name),
      },
    );
    this.filterPanel.render();
  }

  private onConfig(patch: Partial<ExplorationState>): void {
    const sessionPatch: Partial<Pick<Session, "region_kind" | "skip_blocks">> = {};
    if (patch.regionKind !== undefined) sessionPatch.region_kind = patch.regionKind;
    if (patch.skipBlocks !== undefined) sessionPatch.skip_blocks = patch.skipBlocks;
    if (Object.keys(sessionPatch).length > 0) {
      void this.api.updateSession(sessionPatch);
      // geography changed: the old breadcrumb tail may not resolve
      patch = { ...patch, path: [this.meta.city], sort: "name", selected: [] };
    }
    this.store.update(patch);
  }

  private renderChrome(): void {
    this.breadcrumb.render(this.store.state.path);
    this.configPanel.render(this.store.state);
  }

  async refresh(): Promise<void> {
    this.aborter?.abort();
    const aborter = new AbortController();
    this.aborter = aborter;
    const s = this.store.state;
    try {
      const data = await this.fetchViewData(s, aborter.signal);
      if (aborter.signal.aborted) return;
      this.renderViews(s, data);
      this.setError(null);
    } catch (err) {
      if (aborter.signal.aborted) return;
      // previous panels stay up; the failure is reported inline
      this.setError(err instanceof ApiError ? `${err.status}: ${err.message}` : String(err));
    }
  }

  private async fetchViewData(s: ExplorationState, signal: AbortSignal): Promise<ViewData> {
    const fetchAt = async (path: string[]) => {
      const common = {
        path,
        attribute: s.attribute,
        fn: s.fn,
        sort: s.sort,
        region_kind: s.regionKind,
        skip_blocks: s.skipBlocks,
      };
      const [display, complement, shapes] = await Promise.all([
        this.api.matrix({ ...common, mode: s.matrixMode }, signal),
        this.api.matrix({ ...common, mode: seriesMode(s) }, signal),
        this.api.geometries(
          {
            path,
            release: s.mapRelease,
            region_kind: s.regionKind,
            skip_blocks: s.skipBlocks,
          },
          signal,
        ),
      ]);
      return { display, complement, shapes };
    };

    let path = s.path;
    let leaf: string | null = null;
    let data = await fetchAt(path);
    if (data.display.rows.length === 0 && path.length > 1) {
      // a childless leaf; show the node itself as one row of its parent
      leaf = path[path.length - 1];
      path = path.slice(0, -1);
      const parent = await fetchAt(path);
      data = {
        display: selectRows(parent.display, [leaf]),
        complement: selectRows(parent.complement, [leaf]),
        shapes: {
          ...parent.shapes,
          items: parent.shapes.items.filter((f) => f.name === leaf),
        },
      };
    }
    const shapesKey = [
      leaf ?? "", path.join("/"), s.mapRelease, s.regionKind, s.skipBlocks, this.snapshot,
    ].join("|");
    return { ...data, shapesKey, leaf };
  }

  private renderViews(s: ExplorationState, data: ViewData): void {
    const scale = makeScale(s.matrixMode, data.display.cells.flat());
    this.matrixView.render(data.display, scale, s.selected);

    const col = data.display.releases.indexOf(s.mapRelease);
    const byName = new Map(data.display.rows.map((name, i) => [name, data.display.cells[i]]));
    this.mapView.render(
      data.shapesKey,
      data.shapes.items,
      (name) => (col < 0 ? null : (byName.get(name)?.[col] ?? null)),
      scale,
    );

    const chartRows =
      data.leaf !== null
        ? data.display.rows
        : data.complement.rows.filter((name) => s.selected.includes(name));
    const slices: SeriesSlice[] = chartRows.map((name) => {
      const row = data.complement.cells[data.complement.rows.indexOf(name)];
      return {
        name,
        mode: data.complement.mode,
        points: data.complement.releases.map((release, j) => [release, row[j]]),
      };
    });
    this.chartView.render(slices, data.complement.releases);
  }

  async applyFilter(expression: FilterNode | null): Promise<void> {
    if (this.filterPending) return;
    this.filterPending = true;
    try {
      const res = expression
        ? await this.api.applyFilter(expression)
        : await this.api.clearFilter();
      this.snapshot = res.snapshot;
      this.store.update({ filter: expression });
      await this.refreshing;
    } catch (err) {
      this.setError(err instanceof ApiError ? `${err.status}: ${err.message}` : String(err));
    } finally {
      this.filterPending = false;
    }
  }

  async loadHistogram(attribute: string): Promise<void> {
    try {
      const hist = await this.api.histogram({
        attribute,
        bins: 16,
        release: this.store.state.mapRelease,
      });
      this.filterPanel.setHistogram(hist);
    } catch (err) {
      this.setError(err instanceof ApiError ? `${err.status}: ${err.message}` : String(err));
    }
  }

  private setError(message: string | null): void {
    this.lastError = message;
    this.panes.error.textContent = message ?? "";
    this.panes.error.classList.toggle("active", message !== null);
  }
}
