"""Five-level spatiotemporal tree: city, borough, region, block, lot.

The tree is release-faithful: a block whose region assignment differs
between releases materializes under each region it ever belonged to, and
per-release membership filtering keeps every lot under exactly one block
node per release. Lot leaves are materialized lazily; aggregation never
touches them, it runs over per-node candidate index arrays instead.
"""

from __future__ import annotations

import numpy as np

from .dedup import AttributeContainer, GeometryContainer
from .geolevels import UNASSIGNED, LevelAssignment
from .geometry import Polygon, from_shapely, to_shapely
from .ingest import ReleaseSequence
from .model import AttributeKind

__all__ = [
    "TreeOptions",
    "Node",
    "Tree",
    "PathNotFound",
    "IndexBuildError",
    "build_index",
]

LEVELS = ("city", "borough", "region", "block", "lot")
NODE_OVERHEAD_BYTES = 160  # slots object + name + child list entry, measured order


class PathNotFound(KeyError):
    """A path segment did not resolve; carries the failing name and depth."""

    def __init__(self, segment: str, depth: int):
        super().__init__(f"no node named {segment!r} at depth {depth}")
        self.segment = segment
        self.depth = depth


class IndexBuildError(ValueError):
    pass


class Node:
    __slots__ = (
        "level", "name", "parent", "_children",
        "candidates", "region_idx", "block_id", "lot_index", "boundary_ref",
    )

    def __init__(self, level: str, name: str, parent: "Node | None"):
        self.level = level
        self.name = name
        self.parent = parent
        self._children: list[Node] | None = [] if level != "lot" else None
        self.candidates: np.ndarray | None = None
        self.region_idx = -3      # only meaningful on region/block nodes
        self.block_id = -1
        self.lot_index = -1
        self.boundary_ref = -1

    @property
    def path(self) -> tuple[str, ...]:
        names = []
        node: Node | None = self
        while node is not None:
            names.append(node.name)
            node = node.parent
        return tuple(reversed(names))

    def __repr__(self) -> str:
        return f"Node({self.level}: {'/'.join(self.path)})"


class TreeOptions:
    def __init__(
        self,
        region_kind: str = "neighborhood",
        skip_blocks: bool = False,
        city_name: str = "city",
        borough_names: dict[int, str] | None = None,
        borough_boundaries: dict[str, Polygon] | None = None,
        city_boundary: Polygon | None = None,
    ):
        self.region_kind = region_kind
        self.skip_blocks = skip_blocks
        self.city_name = city_name
        self.borough_names = borough_names or {}
        self.borough_boundaries = borough_boundaries or {}
        self.city_boundary = city_boundary

    def borough_name(self, code: int) -> str:
        return self.borough_names.get(code, f"borough-{code}")


class Tree:
    """One built index variant; containers are shared between variants."""

    def __init__(self, seq, gc, ac, assignment, options, exists=None):
        self.options = options
        self.gc: GeometryContainer = gc
        self.ac: AttributeContainer = ac
        self.assignment: LevelAssignment = assignment
        self.releases = list(seq.releases)
        # a filtered snapshot narrows existence without touching containers
        self.exists = seq.exists if exists is None else exists
        self.block_of = seq.block_of_lot
        self.bbls = [lot.bbl for lot in seq.lots]
        self.root: Node | None = None
        self._dissolve_cache: dict[tuple, Polygon | None] = {}

    # ---- navigation ----------------------------------------------------

    def resolve(self, path) -> Node:
        segments = tuple(path)
        if not segments or segments[0] != self.root.name:
            raise PathNotFound(segments[0] if segments else "", 1)
        node = self.root
        for depth, name in enumerate(segments[1:], start=2):
            nxt = self._child_named(node, name)
            if nxt is None:
                raise PathNotFound(name, depth)
            node = nxt
        return node

    def _child_named(self, node: Node, name: str) -> Node | None:
        for child in self.children_of(node):
            if child.name == name:
                return child
        return None

    def children_of(self, node: Node) -> list[Node]:
        if node.level == "lot":
            return []
        if node._children is None:
            node._children = self._materialize_leaves(node)
        return node._children

    def _materialize_leaves(self, node: Node) -> list["Node"]:
        order = sorted(node.candidates.tolist(), key=lambda i: self.bbls[i])
        leaves = []
        for lot in order:
            leaf = Node("lot", self.bbls[lot], node)
            leaf.lot_index = lot
            leaf.region_idx = node.region_idx
            leaves.append(leaf)
        return leaves

    # ---- per-release membership -----------------------------------------

    def members(self, node: Node, r: int) -> np.ndarray:
        """Lot indices valid under this node at release r."""
        if node.level == "lot":
            ok = self.exists[node.lot_index, r] and (
                node.region_idx <= -3
                or self.assignment.block_region[self.block_of[node.lot_index], r]
                == node.region_idx
            )
            return np.asarray([node.lot_index] if ok else [], dtype=np.int32)
        cand = node.candidates
        mask = self.exists[cand, r]
        if node.region_idx > -3:
            mask = mask & (
                self.assignment.block_region[self.block_of[cand], r] == node.region_idx
            )
        return cand[mask]

    # ---- payloads and geometry -------------------------------------------

    def payload(self, node: Node, r: int) -> dict | None:
        """Reference record at one release; None where nonexistent."""
        if node.level == "lot":
            lot = node.lot_index
            if not self.exists[lot, r]:
                return None
            return {
                "geometry": int(self.gc.ref[lot, r]),
                **{
                    kind.value: int(pool.ref[lot, r])
                    for kind, pool in self.ac.pools.items()
                },
            }
        return {"boundary": None if node.boundary_ref < 0 else node.boundary_ref}

    def node_geometry(self, node: Node, r: int) -> Polygon | None:
        """Shape of the node at a release, or None when unavailable."""
        if node.level == "lot":
            ref = self.gc.ref[node.lot_index, r]
            if ref < 0 or not len(self.members(node, r)):
                return None
            return self.gc.shape(int(ref))
        if node.boundary_ref >= 0:
            return self.gc.shape(node.boundary_ref)
        if node.level == "block":
            return self._dissolved(node, r)
        return None

    def _dissolved(self, node: Node, r: int) -> Polygon | None:
        # block outlines are not source data; derive them once per release
        # as the union of member lots and keep them in a side cache
        key = (node.path, r)
        if key not in self._dissolve_cache:
            import shapely

            lots = self.members(node, r)
            if len(lots) == 0:
                self._dissolve_cache[key] = None
            else:
                shapes = [
                    to_shapely(self.gc.shape(int(self.gc.ref[lot, r])))
                    for lot in lots.tolist()
                ]
                merged = shapely.union_all(shapes)
                try:
                    self._dissolve_cache[key] = from_shapely(merged)
                except ValueError:
                    self._dissolve_cache[key] = None
        return self._dissolve_cache[key]

    # ---- accounting -------------------------------------------------------

    def memory_report(self) -> dict:
        stack = [self.root]
        nodes = 0
        cand_bytes = 0
        while stack:
            node = stack.pop()
            nodes += 1
            if node.candidates is not None:
                cand_bytes += node.candidates.nbytes
            if node._children:
                stack.extend(node._children)
        containers = self.gc.nbytes + self.ac.nbytes
        overhead = cand_bytes + nodes * NODE_OVERHEAD_BYTES
        return {
            "container_bytes": containers,
            "node_count": nodes,
            "node_bytes": overhead,
            "total_bytes": containers + overhead,
        }


def build_index(
    seq: ReleaseSequence,
    gc: GeometryContainer,
    ac: AttributeContainer,
    assignment: LevelAssignment,
    options: TreeOptions | None = None,
    exists: np.ndarray | None = None,
) -> Tree:
    """Assemble one tree variant over the shared containers."""
    opts = options or TreeOptions()
    _check_references(seq, gc, ac)
    tree = Tree(seq, gc, ac, assignment, opts, exists=exists)

    L = seq.n_lots
    root = Node("city", opts.city_name, None)
    root.candidates = np.arange(L, dtype=np.int32)
    if opts.city_boundary is not None:
        root.boundary_ref = gc.register_extra("city", opts.city_boundary)
    tree.root = root

    order = np.argsort(seq.block_of_lot, kind="stable")
    sorted_blocks = seq.block_of_lot[order]
    B = len(seq.blocks)
    starts = np.searchsorted(sorted_blocks, np.arange(B))
    ends = np.searchsorted(sorted_blocks, np.arange(B) + 1)
    lots_by_block = [
        np.asarray(order[s:e], dtype=np.int32) for s, e in zip(starts, ends)
    ]

    # which regions each block ever belongs to
    regions = assignment.regions
    by_borough: dict[int, dict[int, list[int]]] = {}
    for b in range(B):
        borough_code = seq.blocks[b][0]
        seen = np.unique(assignment.block_region[b])
        for x in seen.tolist():
            if x == -2:
                continue
            by_borough.setdefault(borough_code, {}).setdefault(x, []).append(b)

    for borough_code in sorted(by_borough, key=opts.borough_name):
        bnode = Node("borough", opts.borough_name(borough_code), root)
        bnode.candidates = np.asarray(
            np.nonzero(seq.borough_of_lot == borough_code)[0], dtype=np.int32
        )
        boundary = opts.borough_boundaries.get(bnode.name)
        if boundary is not None:
            bnode.boundary_ref = gc.register_extra(f"borough:{bnode.name}", boundary)
        root._children.append(bnode)

        region_map = by_borough[borough_code]
        named = sorted(
            region_map.items(),
            key=lambda kv: UNASSIGNED if kv[0] == -1 else regions.names[kv[0]],
        )
        for region_idx, block_ids in named:
            name = UNASSIGNED if region_idx == -1 else regions.names[region_idx]
            rnode = Node("region", name, bnode)
            rnode.region_idx = region_idx
            rnode.candidates = (
                np.concatenate([lots_by_block[b] for b in block_ids])
                if block_ids
                else np.empty(0, dtype=np.int32)
            )
            if region_idx >= 0:
                rnode.boundary_ref = gc.register_extra(
                    f"region:{regions.kind}:{name}", regions.boundaries[region_idx]
                )
            bnode._children.append(rnode)

            if opts.skip_blocks:
                rnode._children = None  # leaves materialize lazily
                continue
            for b in sorted(block_ids, key=lambda i: seq.blocks[i][1]):
                blnode = Node("block", seq.blocks[b][1], rnode)
                blnode.region_idx = region_idx
                blnode.block_id = b
                blnode.candidates = lots_by_block[b]
                blnode._children = None
                rnode._children.append(blnode)

    return tree


def _check_references(seq, gc, ac) -> None:
    bad = seq.exists & (gc.ref < 0)
    for pool in ac.pools.values():
        bad |= seq.exists & (pool.ref < 0)
    if bad.any():
        lot, r = np.argwhere(bad)[0]
        raise IndexBuildError(
            f"missing container reference for ({seq.lots[int(lot)].bbl}, "
            f"{seq.releases[int(r)]})"
        )
