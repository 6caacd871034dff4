/** Wire types, mirroring the server's JSON bodies field for field. */

export type AggregateFn = "sum" | "count" | "min" | "max" | "avg";
export type MatrixMode = "value" | "delta";

export interface AttributeInfo {
  name: string;
  kind: "categorical" | "numerical-stable" | "numerical-unstable" | "derived";
}

export interface Meta {
  city: string;
  releases: string[];
  attributes: AttributeInfo[];
  aggregates: AggregateFn[];
  region_kinds: string[];
  default_region_kind: string;
  lots: number;
  snapshot: string;
  filtered: boolean;
}

export interface Session {
  region_kind: string;
  skip_blocks: boolean;
  snapshot: string;
}

/** rows x releases grid; null marks a child that does not exist there. */
export interface MatrixSlice {
  rows: string[];
  releases: string[];
  cells: (number | null)[][];
  mode: string;
  sort: string;
}

export interface SeriesSlice {
  name: string;
  mode: string;
  points: [string, number | null][];
}

export interface Histogram {
  attribute: string;
  release: string;
  edges: number[];
  counts: number[];
}

export interface GeoFeature {
  name: string;
  geometry: {
    type: "Polygon" | "MultiPolygon";
    coordinates: number[][][] | number[][][][];
  };
}

export interface GeometryList {
  path: string[];
  release: string;
  items: GeoFeature[];
}

/** Filter expression tree, the exact shape POST /api/filter accepts. */
export type FilterNode =
  | { op: "and" | "or" | "not"; children: FilterNode[] }
  | { op: "invalid"; attr: string }
  | { op: "=" | "!=" | "<" | "<=" | ">" | ">="; attr: string; value: number | string }
  | { op: "in"; attr: string; value: (number | string)[] }
  | { op: "range"; attr: string; value: [number, number] };
