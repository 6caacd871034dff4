/** Cross-view consistency: for any exploration state, the matrix cell, the
 * map fill, and the line chart dot for the same (region, release) must all
 * come from the same fetched response, and gray/null must appear exactly
 * where the server sent null. The states are randomized but seeded.
 */

import { beforeAll, describe, expect, it } from "vitest";

import { makeScale, NULL_COLOR } from "../src/scales.js";
import { seriesMode } from "../src/state.js";
import type { ExplorationState } from "../src/state.js";
import type { GeometryList, MatrixMode, MatrixSlice } from "../src/types.js";
import { CITY, RELEASES } from "./fake-server.js";
import type { FakeServer } from "./fake-server.js";
import { mountApp, mulberry32, pick } from "./helpers.js";
import type { Mounted } from "./helpers.js";

const ATTRIBUTES = [null, "LOTAREA", "ASSESSTOTAL"] as const;
const FNS = ["sum", "count", "min", "max", "avg"] as const;

function pathPool(kind: string, skip: boolean): string[][] {
  const pool: string[][] = [[CITY], [CITY, "alpha"], [CITY, "beta"]];
  if (kind === "district") {
    pool.push([CITY, "alpha", "a1"], [CITY, "alpha", "a2"], [CITY, "beta", "b1"], [CITY, "beta", "b2"]);
    if (!skip) pool.push([CITY, "alpha", "a1", "100"], [CITY, "beta", "b1", "300"]);
  } else {
    pool.push([CITY, "alpha", "w1"], [CITY, "alpha", "w2"], [CITY, "beta", "w2"]);
    if (!skip) pool.push([CITY, "alpha", "w2", "101"], [CITY, "beta", "w2", "300"]);
  }
  return pool;
}

function randomState(rng: () => number): ExplorationState {
  const regionKind = pick(rng, ["district", "ward"]);
  const skipBlocks = rng() < 0.4;
  const attribute = pick(rng, ATTRIBUTES);
  return {
    path: pick(rng, pathPool(regionKind, skipBlocks)),
    attribute,
    fn: attribute === null ? "count" : pick(rng, FNS),
    matrixMode: pick(rng, ["value", "delta"]),
    sort: rng() < 0.5 ? "name" : pick(rng, RELEASES),
    selected: [],
    mapRelease: pick(rng, RELEASES),
    regionKind,
    skipBlocks,
    filter: null,
  };
}

function lastResponse(fake: FakeServer, mark: number, match: (body: any) => boolean): any {
  for (let i = fake.log.length - 1; i >= mark; i--) {
    const e = fake.log[i];
    if (e.route === "/api/query" && match(e.body)) return e.response;
  }
  throw new Error("expected query was never sent");
}

describe("view consistency", () => {
  let m: Mounted;

  beforeAll(async () => {
    m = await mountApp();
  });

  it("renders identical fetched numbers in matrix, map, and chart across 20 states", async () => {
    const rng = mulberry32(0x5eed);

    for (let round = 0; round < 20; round++) {
      const state = randomState(rng);
      const label = `round ${round} ${JSON.stringify(state.path)} ${state.attribute}/${state.fn} ${state.matrixMode}`;

      const mark = m.fake.log.length;
      m.app.store.replace(state);
      await m.app.refreshing;

      const rowNames = [...m.root.querySelectorAll<HTMLElement>(".pane-matrix tbody tr")].map(
        (tr) => tr.dataset.name!,
      );
      const selected = rowNames.filter(() => rng() < 0.5).slice(0, 3);
      if (selected.length > 0) {
        m.app.store.update({ selected });
        await m.app.refreshing;
      }

      const slice: MatrixSlice = lastResponse(
        m.fake, mark, (b) => b.kind === "matrix" && b.mode === state.matrixMode,
      );
      const complement: MatrixSlice = lastResponse(
        m.fake, mark, (b) => b.kind === "matrix" && b.mode === seriesMode(state),
      );
      const geo: GeometryList = lastResponse(m.fake, mark, (b) => b.kind === "geometries");

      checkMatrix(state, slice, label);
      checkMap(state, slice, geo, label);
      checkChart(state, complement, selected, label);
    }
  });

  function checkMatrix(state: ExplorationState, slice: MatrixSlice, label: string): void {
    const scale = makeScale(state.matrixMode as MatrixMode, slice.cells.flat());
    const trs = [...m.root.querySelectorAll<HTMLElement>(".pane-matrix tbody tr")];
    expect(trs.map((tr) => tr.dataset.name), label).toEqual(slice.rows);

    const sorted = m.root.querySelector<HTMLElement>(".pane-matrix thead th.sorted");
    if (state.sort === "name") {
      expect(sorted, label).toBeNull();
    } else {
      expect(sorted?.dataset.release, label).toBe(state.sort);
    }

    slice.rows.forEach((name, i) => {
      slice.releases.forEach((release, j) => {
        const cell = slice.cells[i][j];
        const td = m.root.querySelector<HTMLElement>(
          `.pane-matrix td[data-name="${name}"][data-release="${release}"]`,
        )!;
        expect(td, label).not.toBeNull();
        expect(td.dataset.value, `${label} cell ${name}@${release}`).toBe(String(cell));
        expect(td.classList.contains("cell-null"), label).toBe(cell === null);
        if (cell !== null) {
          expect(td.dataset.bucket, label).toBe(String(scale.bucket(cell)));
        }
      });
    });
  }

  function checkMap(
    state: ExplorationState,
    slice: MatrixSlice,
    geo: GeometryList,
    label: string,
  ): void {
    const scale = makeScale(state.matrixMode as MatrixMode, slice.cells.flat());
    const shapes = [...m.root.querySelectorAll<SVGPathElement>(".pane-map svg path")];
    expect(shapes.map((p) => p.getAttribute("data-name")).sort(), label).toEqual(
      geo.items.map((f) => f.name).sort(),
    );

    const col = slice.releases.indexOf(state.mapRelease);
    for (const shape of shapes) {
      const name = shape.getAttribute("data-name")!;
      const row = slice.rows.indexOf(name);
      const cell = row < 0 || col < 0 ? null : slice.cells[row][col];
      expect(shape.getAttribute("data-value"), `${label} map ${name}`).toBe(String(cell));
      if (cell === null) {
        expect(shape.getAttribute("fill"), label).toBe(NULL_COLOR);
        expect(shape.getAttribute("data-bucket"), label).toBeNull();
      } else {
        expect(shape.getAttribute("fill"), label).toBe(scale.color(cell));
        // same bucket the matrix stamped on the same number
        const td = m.root.querySelector<HTMLElement>(
          `.pane-matrix td[data-name="${name}"][data-release="${state.mapRelease}"]`,
        )!;
        expect(shape.getAttribute("data-bucket"), label).toBe(td.dataset.bucket!);
      }
    }
  }

  function checkChart(
    state: ExplorationState,
    complement: MatrixSlice,
    selected: string[],
    label: string,
  ): void {
    const dots = [...m.root.querySelectorAll<SVGCircleElement>(".pane-chart circle")];
    let expected = 0;
    for (const name of selected) {
      const row = complement.rows.indexOf(name);
      expect(row, label).toBeGreaterThanOrEqual(0);
      complement.releases.forEach((release, j) => {
        const cell = complement.cells[row][j];
        const dot = m.root.querySelector(
          `.pane-chart circle[data-name="${name}"][data-release="${release}"]`,
        );
        if (cell === null) {
          expect(dot, `${label} chart ${name}@${release} must break`).toBeNull();
        } else {
          expected += 1;
          expect(dot, `${label} chart ${name}@${release}`).not.toBeNull();
          expect(dot!.getAttribute("data-value"), label).toBe(String(cell));
        }
      });
    }
    // nothing beyond the selection is drawn; empty selection, empty axes
    expect(dots.length, label).toBe(expected);
  }
});
