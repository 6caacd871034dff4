"""HTTP facade over the query engine.

Route contract:

    GET  /api/meta      503 while the engine is still loading, else metadata
    GET  /api/session   current session defaults and active snapshot
    POST /api/session   update region kind / block-skip defaults
    POST /api/query     one query; kind selects the operation
    POST /api/filter    install a filter (atomic snapshot swap), 202
    DELETE /api/filter  restore the unfiltered snapshot, 202

Errors: 400 for malformed requests, 404 for unresolvable paths, 422 for
semantic problems (unknown attribute, type mismatch, release outside the
timeline, invalid filter expression). Responses are plain JSON built from
deterministic structures, so identical queries against the same snapshot
return byte-identical bodies.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from fastapi import Body, FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .index import PathNotFound
from .query import (
    AGGREGATE_FNS,
    Engine,
    FilterError,
    FilterExpression,
    InvalidRelease,
    QueryError,
    QueryTypeError,
    UnknownAttribute,
)

__all__ = ["SessionState", "create_app"]

QUERY_KINDS = ("geometries", "aggregate", "matrix", "series", "histogram")


@dataclass
class SessionState:
    """Server-side defaults a UI session can adjust."""

    region_kind: str = "neighborhood"
    skip_blocks: bool = False


def _err(status: int, message: str, **extra) -> JSONResponse:
    return JSONResponse({"error": message, **extra}, status_code=status)


def create_app(engine: Engine | None = None, *, loader=None, static_dir=None) -> FastAPI:
    """Build the app; `loader` runs in a thread and swaps the engine in."""
    app = FastAPI(title="chronicle", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.engine = engine
    app.state.load_error = None
    app.state.session = SessionState(
        region_kind=engine.default_region_kind if engine else "neighborhood"
    )

    if loader is not None:

        def _load():
            try:
                loaded = loader()
                app.state.session = SessionState(region_kind=loaded.default_region_kind)
                app.state.engine = loaded
            except Exception as exc:   # surfaced via /api/meta
                app.state.load_error = f"{type(exc).__name__}: {exc}"

        threading.Thread(target=_load, daemon=True).start()

    def _engine() -> Engine | None:
        return app.state.engine

    # ---- metadata ---------------------------------------------------------

    @app.get("/api/meta")
    def meta():
        eng = _engine()
        if eng is None:
            detail = app.state.load_error or "loading"
            return _err(503, detail)
        return {
            "city": eng.city_name,
            "releases": [str(r) for r in eng.releases],
            "attributes": [
                {"name": name, "kind": eng.attribute_kind(name).value}
                for name in eng.attribute_names()
            ],
            "aggregates": list(AGGREGATE_FNS),
            "region_kinds": sorted(eng.assignments),
            "default_region_kind": eng.default_region_kind,
            "lots": eng.seq.n_lots,
            "snapshot": eng.snapshot.id,
            "filtered": eng.snapshot.expr is not None,
        }

    @app.get("/api/session")
    def session():
        eng = _engine()
        if eng is None:
            return _err(503, "loading")
        state: SessionState = app.state.session
        return {
            "region_kind": state.region_kind,
            "skip_blocks": state.skip_blocks,
            "snapshot": eng.snapshot.id,
        }

    @app.post("/api/session")
    def update_session(body: dict = Body(...)):
        eng = _engine()
        if eng is None:
            return _err(503, "loading")
        state: SessionState = app.state.session
        kind = body.get("region_kind", state.region_kind)
        if kind not in eng.assignments:
            return _err(422, f"no region set of kind {kind!r}")
        skip = body.get("skip_blocks", state.skip_blocks)
        if not isinstance(skip, bool):
            return _err(400, "skip_blocks must be a boolean")
        app.state.session = SessionState(region_kind=kind, skip_blocks=skip)
        return {"region_kind": kind, "skip_blocks": skip, "snapshot": eng.snapshot.id}

    # ---- queries -------------------------------------------------------------

    @app.post("/api/query")
    def query(body: dict = Body(...)):
        eng = _engine()
        if eng is None:
            return _err(503, "loading")
        kind = body.get("kind")
        if kind not in QUERY_KINDS:
            return _err(400, f"query kind must be one of {', '.join(QUERY_KINDS)}")
        state: SessionState = app.state.session
        region_kind = body.get("region_kind", state.region_kind)
        skip_blocks = body.get("skip_blocks", state.skip_blocks)
        snapshot_id = body.get("snapshot")
        if not isinstance(skip_blocks, bool):
            return _err(400, "skip_blocks must be a boolean")

        path = body.get("path")
        if kind != "histogram" or path is not None:
            if not isinstance(path, list) or not all(isinstance(s, str) for s in path):
                return _err(400, "path must be a list of name segments")

        try:
            if kind == "geometries":
                simplify = body.get("simplify")
                if simplify is not None and not isinstance(simplify, (int, float)):
                    return _err(400, "simplify must be a number")
                items = eng.retrieve_geometries(
                    path,
                    body.get("release"),
                    region_kind=region_kind,
                    skip_blocks=skip_blocks,
                    snapshot_id=snapshot_id,
                    simplify=simplify,
                )
                return {
                    "path": path,
                    "release": str(body.get("release")),
                    "items": [
                        {"name": name, "geometry": poly.to_geojson()}
                        for name, poly in items
                    ],
                }
            if kind == "aggregate":
                value = eng.aggregate(
                    path,
                    body.get("attribute"),
                    body.get("fn", "count"),
                    body.get("release"),
                    region_kind=region_kind,
                    skip_blocks=skip_blocks,
                    snapshot_id=snapshot_id,
                )
                return {"value": value}
            if kind == "matrix":
                slice_ = eng.aggregate_matrix(
                    path,
                    body.get("attribute"),
                    body.get("fn", "count"),
                    mode=body.get("mode", "value"),
                    sort=body.get("sort", "name"),
                    base_release=body.get("base_release"),
                    region_kind=region_kind,
                    skip_blocks=skip_blocks,
                    snapshot_id=snapshot_id,
                )
                return slice_.to_json()
            if kind == "series":
                selected = body.get("selected")
                if not isinstance(selected, list) or not selected:
                    return _err(400, "selected must be a non-empty list of names")
                series = eng.series(
                    path,
                    selected,
                    body.get("attribute"),
                    body.get("fn", "count"),
                    mode=body.get("mode", "value"),
                    base_release=body.get("base_release"),
                    region_kind=region_kind,
                    skip_blocks=skip_blocks,
                    snapshot_id=snapshot_id,
                )
                return {"series": [s.to_json() for s in series]}
            # histogram
            bins = body.get("bins", 20)
            if not isinstance(bins, int) or isinstance(bins, bool) or bins <= 0:
                return _err(400, "bins must be a positive integer")
            hist = eng.attribute_histogram(
                body.get("attribute"),
                bins,
                release=body.get("release"),
                path=path,
                region_kind=region_kind,
                snapshot_id=snapshot_id,
            )
            return hist.to_json()
        except PathNotFound as exc:
            return _err(404, str(exc), segment=exc.segment, depth=exc.depth)
        except (UnknownAttribute, QueryTypeError, InvalidRelease, FilterError) as exc:
            return _err(422, str(exc))
        except QueryError as exc:
            return _err(400, str(exc))

    # ---- filters ----------------------------------------------------------------

    @app.post("/api/filter")
    def set_filter(body: dict = Body(...)):
        eng = _engine()
        if eng is None:
            return _err(503, "loading")
        expression = body.get("expression")
        if expression is None:
            return _err(400, "body needs an 'expression' object")
        state: SessionState = app.state.session
        try:
            expr = FilterExpression.from_json(expression)
            snapshot_id = eng.apply_filter(expr, region_kind=state.region_kind)
        except (FilterError, UnknownAttribute, QueryTypeError) as exc:
            return _err(422, str(exc))
        return JSONResponse({"snapshot": snapshot_id}, status_code=202)

    @app.delete("/api/filter")
    def drop_filter():
        eng = _engine()
        if eng is None:
            return _err(503, "loading")
        return JSONResponse({"snapshot": eng.clear_filter()}, status_code=202)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
