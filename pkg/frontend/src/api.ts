/** Thin client for the query server. All numbers shown anywhere in the UI
 * come back through this module; nothing downstream computes aggregates. */

import type {
  FilterNode,
  GeometryList,
  Histogram,
  MatrixSlice,
  Meta,
  SeriesSlice,
  Session,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly segment?: string,
    readonly depth?: number,
  ) {
    super(message);
  }
}

export type FetchFn = (url: string, init?: RequestInit) => Promise<Response>;

export interface QueryCommon {
  path?: string[];
  region_kind?: string;
  skip_blocks?: boolean;
  snapshot?: string;
}

async function parse(res: Response): Promise<any> {
  const body = await res.json().catch(() => ({}));
  if (!res.ok) {
    throw new ApiError(res.status, body.error ?? res.statusText, body.segment, body.depth);
  }
  return body;
}

export class Api {
  constructor(
    private readonly fetchFn: FetchFn = (u, i) => fetch(u, i),
    private readonly base = "",
  ) {}

  protected async get(route: string): Promise<any> {
    return parse(await this.fetchFn(this.base + route));
  }

  protected async send(route: string, method: string, body?: unknown, signal?: AbortSignal): Promise<any> {
    return parse(
      await this.fetchFn(this.base + route, {
        method,
        headers: { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
        signal,
      }),
    );
  }

  meta(): Promise<Meta> {
    return this.get("/api/meta");
  }

  session(): Promise<Session> {
    return this.get("/api/session");
  }

  updateSession(patch: Partial<Pick<Session, "region_kind" | "skip_blocks">>): Promise<Session> {
    return this.send("/api/session", "POST", patch);
  }

  matrix(
    req: QueryCommon & {
      attribute: string | null;
      fn: string;
      mode: string;
      sort: string;
    },
    signal?: AbortSignal,
  ): Promise<MatrixSlice> {
    return this.send("/api/query", "POST", { kind: "matrix", ...req }, signal);
  }

  series(
    req: QueryCommon & { selected: string[]; attribute: string | null; fn: string; mode: string },
    signal?: AbortSignal,
  ): Promise<{ series: SeriesSlice[] }> {
    return this.send("/api/query", "POST", { kind: "series", ...req }, signal);
  }

  geometries(
    req: QueryCommon & { release: string; simplify?: number },
    signal?: AbortSignal,
  ): Promise<GeometryList> {
    return this.send("/api/query", "POST", { kind: "geometries", ...req }, signal);
  }

  histogram(
    req: QueryCommon & { attribute: string; bins: number; release?: string },
    signal?: AbortSignal,
  ): Promise<Histogram> {
    return this.send("/api/query", "POST", { kind: "histogram", ...req }, signal);
  }

  applyFilter(expression: FilterNode): Promise<{ snapshot: string }> {
    return this.send("/api/filter", "POST", { expression });
  }

  clearFilter(): Promise<{ snapshot: string }> {
    return this.send("/api/filter", "DELETE");
  }
}
