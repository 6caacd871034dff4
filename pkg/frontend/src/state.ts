/** Exploration state and its invariants.
 *
 * The matrix and the line chart always show complementary modes: when the
 * grid shows values the chart shows change, and the other way around. The
 * store enforces that by deriving the chart mode instead of storing it.
 * Drill-down saves the sort and row selection per depth, so rolling back
 * up the breadcrumb restores the view the user left behind.
 */

import type { AggregateFn, FilterNode, MatrixMode } from "./types.js";

export interface ExplorationState {
  /** breadcrumb, starting at the city root segment */
  path: string[];
  /** null means "count lots" rather than aggregate an attribute */
  attribute: string | null;
  fn: AggregateFn;
  matrixMode: MatrixMode;
  /** "name" or a release string; applied server-side */
  sort: string;
  /** row names drawn in the line chart */
  selected: string[];
  mapRelease: string;
  regionKind: string;
  skipBlocks: boolean;
  filter: FilterNode | null;
}

export function seriesMode(state: ExplorationState): MatrixMode {
  return state.matrixMode === "value" ? "delta" : "value";
}

interface ViewFrame {
  sort: string;
  selected: string[];
}

export type Listener = (state: ExplorationState) => void;

export class Store {
  private listeners: Listener[] = [];
  /** saved sort/selection keyed by path length, for breadcrumb roll-up */
  private frames = new Map<number, ViewFrame>();

  constructor(public state: ExplorationState) {}

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  update(patch: Partial<ExplorationState>): void {
    const next = { ...this.state, ...patch };
    if (next.attribute === null) next.fn = "count";
    this.state = next;
    this.emit();
  }

  /** Replace everything at once; used by tests to jump between states. */
  replace(state: ExplorationState): void {
    this.frames.clear();
    this.state = { ...state };
    this.emit();
  }

  drillDown(name: string): void {
    this.frames.set(this.state.path.length, {
      sort: this.state.sort,
      selected: [...this.state.selected],
    });
    this.update({
      path: [...this.state.path, name],
      sort: "name",
      selected: [],
    });
  }

  /** Truncate the breadcrumb to `length` segments, restoring that depth's view. */
  rollUp(length: number): void {
    if (length >= this.state.path.length || length < 1) return;
    const frame = this.frames.get(length);
    for (const depth of [...this.frames.keys()]) {
      if (depth >= length) this.frames.delete(depth);
    }
    this.update({
      path: this.state.path.slice(0, length),
      sort: frame ? frame.sort : "name",
      selected: frame ? frame.selected : [],
    });
  }

  toggleSelected(name: string): void {
    const selected = this.state.selected.includes(name)
      ? this.state.selected.filter((s) => s !== name)
      : [...this.state.selected, name];
    this.update({ selected });
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }
}
