/** Scripted walk through the whole exploration loop: sort, select, drill
 * from the city down to one lot, roll back up with the view restored,
 * then brush a filter range, apply it server-side, and clear it again.
 */

import { beforeAll, describe, expect, it } from "vitest";

import type { FilterNode, MatrixSlice } from "../src/types.js";
import { CITY } from "./fake-server.js";
import { mountApp, settle } from "./helpers.js";
import type { Mounted } from "./helpers.js";

let m: Mounted;

beforeAll(async () => {
  m = await mountApp();
});

const rows = () =>
  [...m.root.querySelectorAll<HTMLElement>(".pane-matrix tbody tr")].map(
    (tr) => tr.dataset.name!,
  );

const row = (name: string) =>
  m.root.querySelector<HTMLElement>(`.pane-matrix tbody tr[data-name="${name}"]`)!;

const click = (el: Element | null) => {
  expect(el).not.toBeNull();
  (el as HTMLElement).click();
};

function lastMatrix(mark: number, mode: string): MatrixSlice {
  for (let i = m.fake.log.length - 1; i >= mark; i--) {
    const e = m.fake.log[i];
    if (e.route === "/api/query" && e.body.kind === "matrix" && e.body.mode === mode) {
      return e.response;
    }
  }
  throw new Error(`no ${mode} matrix fetched`);
}

describe("drill-down and roll-up", () => {
  it("starts at the city with boroughs as rows", () => {
    expect(m.app.store.state.path).toEqual([CITY]);
    expect(rows()).toEqual(["alpha", "beta"]);
    expect(m.app.store.state.attribute).toBe("ASSESSTOTAL");
  });

  it("sorts by a clicked release header, descending", async () => {
    click(m.root.querySelector('.pane-matrix thead th[data-release="2005.1"]'));
    await m.app.refreshing;
    expect(m.app.store.state.sort).toBe("2005.1");
    expect(m.root.querySelector(".pane-matrix thead th.sorted")).not.toBeNull();
    // alpha 1565000 vs beta 96000 at 2005.1
    expect(rows()).toEqual(["alpha", "beta"]);
    const slice = lastMatrix(0, "value");
    expect(slice.sort).toBe("2005.1");
    expect(slice.cells[0][2]! > slice.cells[1][2]!).toBe(true);
  });

  it("tracks a row selection for the chart", async () => {
    click(row("beta").querySelector("button.row-pick"));
    await m.app.refreshing;
    expect(m.app.store.state.selected).toEqual(["beta"]);
    expect(row("beta").classList.contains("selected")).toBe(true);
    expect(m.root.querySelectorAll('.pane-chart circle[data-name="beta"]').length).toBeGreaterThan(0);
  });

  it("drills borough -> region -> block -> lot via row labels", async () => {
    click(row("alpha").querySelector("th.row-label"));
    await m.app.refreshing;
    expect(m.app.store.state.path).toEqual([CITY, "alpha"]);
    expect(m.app.store.state.sort).toBe("name");
    expect(m.app.store.state.selected).toEqual([]);
    expect(rows()).toEqual(["a1", "a2"]);

    click(row("a1").querySelector("th.row-label"));
    await m.app.refreshing;
    expect(rows()).toEqual(["100", "101"]);

    click(row("100").querySelector("th.row-label"));
    await m.app.refreshing;
    expect(rows()).toEqual(["1001", "1002"]);

    const mark = m.fake.log.length;
    click(row("1001").querySelector("th.row-label"));
    await m.app.refreshing;
    expect(m.app.store.state.path).toEqual([CITY, "alpha", "a1", "100", "1001"]);
    expect(m.root.querySelectorAll(".breadcrumb a").length).toBe(5);

    // the lot has no children, so its row is lifted from the parent fetch
    const parent = lastMatrix(mark, "value");
    expect(parent.rows).toContain("1002");
    const i = parent.rows.indexOf("1001");
    expect(rows()).toEqual(["1001"]);
    parent.releases.forEach((release, j) => {
      const td = m.root.querySelector<HTMLElement>(
        `.pane-matrix td[data-name="1001"][data-release="${release}"]`,
      )!;
      expect(td.dataset.value).toBe(String(parent.cells[i][j]));
    });

    // chart shows the lot itself without an explicit selection
    const delta = lastMatrix(mark, "delta");
    const di = delta.rows.indexOf("1001");
    const nonNull = delta.cells[di].filter((c) => c !== null).length;
    expect(m.root.querySelectorAll('.pane-chart circle[data-name="1001"]').length).toBe(nonNull);

    const shapes = [...m.root.querySelectorAll(".pane-map svg path")];
    expect(shapes.map((p) => p.getAttribute("data-name"))).toEqual(["1001"]);
  });

  it("restores the saved sort and selection when rolling up the breadcrumb", async () => {
    click(m.root.querySelector('.breadcrumb a[data-depth="3"]'));
    await m.app.refreshing;
    expect(m.app.store.state.path).toEqual([CITY, "alpha", "a1"]);

    click(m.root.querySelector('.breadcrumb a[data-depth="1"]'));
    await m.app.refreshing;
    expect(m.app.store.state.path).toEqual([CITY]);
    expect(m.app.store.state.sort).toBe("2005.1");
    expect(m.app.store.state.selected).toEqual(["beta"]);

    const sorted = m.root.querySelector<HTMLElement>(".pane-matrix thead th.sorted");
    expect(sorted?.dataset.release).toBe("2005.1");
    expect(row("beta").classList.contains("selected")).toBe(true);
    const names = new Set(
      [...m.root.querySelectorAll(".pane-chart circle")].map((c) => c.getAttribute("data-name")),
    );
    expect([...names]).toEqual(["beta"]);
  });
});

describe("filter round-trip", () => {
  // lots alive at 2005.1 span LOTAREA 900..5000; a drag from the left edge
  // to the middle of the 340px plot snaps to edge 8 of 16: 2950
  const expectedRange: FilterNode = { op: "range", attr: "LOTAREA", value: [900, 2950] };

  it("brushing the histogram snaps to bin edges and builds a range chip", () => {
    const svg = m.root.querySelector<SVGSVGElement>(".filter-hist")!;
    expect(svg).not.toBeNull();
    svg.dispatchEvent(new MouseEvent("mousedown", { clientX: 10, bubbles: true }));
    svg.dispatchEvent(new MouseEvent("mousemove", { clientX: 180, bubbles: true }));
    svg.dispatchEvent(new MouseEvent("mouseup", { clientX: 180, bubbles: true }));

    click(m.root.querySelector(".brush-confirm"));
    const chips = m.root.querySelectorAll(".chip");
    expect(chips.length).toBe(1);
    expect(chips[0].textContent).toContain("LOTAREA in [900, 2950]");
  });

  it("applies the brushed range as a server-side filter and refreshes all views", async () => {
    const mark = m.fake.log.length;
    click(m.root.querySelector(".filter-apply"));
    await settle(m.app);

    const posts = m.fake.exchanges("/api/filter").filter((e) => e.method === "POST");
    expect(posts.length).toBe(1);
    expect(posts[0].body.expression).toEqual(expectedRange);
    expect(posts[0].response.snapshot).toBe("snap-1");
    expect(m.app.store.state.filter).toEqual(expectedRange);

    // all three views were refetched after the filter landed
    const queries = m.fake.log.slice(mark).filter((e) => e.route === "/api/query");
    for (const kind of ["matrix", "geometries"]) {
      expect(queries.some((e) => e.body.kind === kind)).toBe(true);
    }

    // 1001, 1002, 1011, 3001 fall in [900, 2950]; 2001, 3002, 3101 do not
    expect(rows()).toEqual(["alpha", "beta"]);
    const alpha = m.root.querySelector<HTMLElement>(
      '.pane-matrix td[data-name="alpha"][data-release="2004.1"]',
    )!;
    expect(alpha.dataset.value).toBe("150000");
    const beta = m.root.querySelector<HTMLElement>(
      '.pane-matrix td[data-name="beta"][data-release="2004.1"]',
    )!;
    expect(beta.dataset.value).toBe("80000");

    const slice = lastMatrix(mark, "value");
    const shapes = [...m.root.querySelectorAll(".pane-map svg path")];
    expect(shapes.map((p) => p.getAttribute("data-name")).sort()).toEqual(["alpha", "beta"]);
    for (const shape of shapes) {
      const i = slice.rows.indexOf(shape.getAttribute("data-name")!);
      expect(shape.getAttribute("data-value")).toBe(String(slice.cells[i][2]));
    }
  });

  it("lets at most one filter application run at a time", async () => {
    const before = m.fake.exchanges("/api/filter").length;
    let release!: () => void;
    m.fake.gate = new Promise((resolve) => (release = resolve));
    const first = m.app.applyFilter(expectedRange);
    const second = m.app.applyFilter(expectedRange);
    release();
    m.fake.gate = null;
    await first;
    await second;
    await settle(m.app);
    expect(m.fake.exchanges("/api/filter").length).toBe(before + 1);
  });

  it("clears the filter server-side and returns to unfiltered numbers", async () => {
    click(m.root.querySelector(".filter-clear"));
    await settle(m.app);

    const deletes = m.fake.exchanges("/api/filter").filter((e) => e.method === "DELETE");
    expect(deletes.length).toBe(1);
    expect(m.fake.snapshot).toBe("base");
    expect(m.app.store.state.filter).toBeNull();

    const alpha = m.root.querySelector<HTMLElement>(
      '.pane-matrix td[data-name="alpha"][data-release="2004.1"]',
    )!;
    expect(alpha.dataset.value).toBe("1150000");
  });
});

describe("failure handling", () => {
  it("keeps the previous grid and shows an inline error when a fetch fails", async () => {
    const before = rows();
    m.app.store.update({ path: [CITY, "nowhere"] });
    await settle(m.app);

    const banner = m.root.querySelector<HTMLElement>(".pane-error")!;
    expect(banner.classList.contains("active")).toBe(true);
    expect(banner.textContent).toContain("404");
    expect(rows()).toEqual(before);

    m.app.store.update({ path: [CITY] });
    await settle(m.app);
    expect(banner.classList.contains("active")).toBe(false);
    expect(m.app.lastError).toBeNull();
  });

  it("abandons a superseded refresh instead of racing it", async () => {
    let release!: () => void;
    m.fake.gate = new Promise((resolve) => (release = resolve));
    m.app.store.update({ sort: "2004.2" });
    m.app.store.update({ sort: "2005.1" });
    release();
    m.fake.gate = null;
    await settle(m.app);

    const sorted = m.root.querySelector<HTMLElement>(".pane-matrix thead th.sorted");
    expect(sorted?.dataset.release).toBe("2005.1");
    expect(m.app.lastError).toBeNull();
  });
});
