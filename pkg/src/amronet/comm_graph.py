"""Unit-disk communication graph and connected components."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .geometry import Point2

# relative slack on the closed disk so points built at exactly r_c stay linked
LINK_RTOL = 1e-12


def in_range(d: float, r_c: float) -> bool:
    return d <= r_c * (1.0 + LINK_RTOL)


class NodeKind(str, Enum):
    BASE_STATION = "base_station"
    ROUTER = "router"
    AGENT = "agent"


@dataclass
class NodeRecord:
    id: int
    kind: NodeKind
    position: Point2
    status: int = -1
    reference: bool = False


class UnionFind:
    """Disjoint sets over arbitrary hashable keys, path halving + union by size."""

    def __init__(self, items: Iterable = ()):
        self.parent: dict = {}
        self.size: dict = {}
        self.count = 0
        for it in items:
            self.add(it)

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1
            self.count += 1

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1
        return True

    def connected(self, a, b) -> bool:
        return self.find(a) == self.find(b)


@dataclass
class CommGraph:
    nodes: dict[int, NodeRecord]
    adjacency: dict[int, set[int]]
    r_c: float

    @property
    def edges(self) -> set[tuple[int, int]]:
        return {(u, v) for u, nb in self.adjacency.items() for v in nb if u < v}

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])


def build(nodes: Sequence[NodeRecord], r_c: float) -> CommGraph:
    if r_c <= 0:
        raise ValueError("r_c must be positive")
    by_id: dict[int, NodeRecord] = {}
    for n in nodes:
        if n.id in by_id:
            raise ValueError(f"duplicate node id {n.id}")
        by_id[n.id] = n
    adj: dict[int, set[int]] = {n.id: set() for n in nodes}
    if len(nodes) > 1:
        pts = np.array([n.position for n in nodes], dtype=float)
        # candidate pairs from the tree, exact closed-disk test afterwards
        for i, j in cKDTree(pts).query_pairs(r_c * (1.0 + 1e-9)):
            a, b = nodes[i], nodes[j]
            if in_range(math.dist(a.position, b.position), r_c):
                adj[a.id].add(b.id)
                adj[b.id].add(a.id)
    return CommGraph(by_id, adj, r_c)


def components(g: CommGraph) -> dict[int, int]:
    """Component label per node id; labels 0, 1, ... ordered by smallest member id."""
    uf = UnionFind(sorted(g.nodes))
    for u, v in g.edges:
        uf.union(u, v)
    labels: dict[int, int] = {}
    root_label: dict[int, int] = {}
    for u in sorted(g.nodes):
        r = uf.find(u)
        if r not in root_label:
            root_label[r] = len(root_label)
        labels[u] = root_label[r]
    return labels


def n_components(g: CommGraph) -> int:
    return len(set(components(g).values()))


def same_component(g: CommGraph, u: int, v: int) -> bool:
    for x in (u, v):
        if x not in g.nodes:
            raise KeyError(f"node {x} not in graph")
    labels = components(g)
    return labels[u] == labels[v]


def references_in_range(nodes: Iterable[NodeRecord], p, r_c: float) -> list[int]:
    hits = []
    for n in nodes:
        if not n.reference:
            continue
        d = math.dist(n.position, p)
        if in_range(d, r_c):
            hits.append((d, n.id))
    hits.sort()
    return [i for _, i in hits]


@dataclass
class StationaryNetwork:
    """Growing set of immobile reference nodes with incremental components.

    Stationary nodes never move or disappear, so incremental unions give the
    same components as rebuilding the unit-disk graph from scratch.
    """

    r_c: float
    positions: dict[int, Point2] = field(default_factory=dict)
    status: dict[int, int] = field(default_factory=dict)
    disabled: dict[int, bool] = field(default_factory=dict)
    uf: UnionFind = field(default_factory=UnionFind)
    _cells: dict = field(default_factory=lambda: defaultdict(list))

    def _cell(self, p) -> tuple[int, int]:
        return (math.floor(p[0] / self.r_c), math.floor(p[1] / self.r_c))

    def __contains__(self, node_id: int) -> bool:
        return node_id in self.positions

    def __len__(self) -> int:
        return len(self.positions)

    def add(self, node_id: int, p, status: int) -> list[int]:
        """Insert a node; returns the ids it links to."""
        p = Point2(float(p[0]), float(p[1]))
        linked = [j for _, j in self.in_range(p)]
        self.positions[node_id] = p
        self.status[node_id] = status
        self.disabled.setdefault(node_id, False)
        self.uf.add(node_id)
        for j in linked:
            self.uf.union(node_id, j)
        self._cells[self._cell(p)].append(node_id)
        return linked

    def in_range(self, p) -> list[tuple[float, int]]:
        """(distance, id) of nodes within r_c of p, sorted by distance then id."""
        cx, cy = self._cell(p)
        px, py = p[0], p[1]
        r = self.r_c
        out = []
        pos = self.positions
        for i in (cx - 1, cx, cx + 1):
            for j in (cy - 1, cy, cy + 1):
                for nid in self._cells.get((i, j), ()):
                    q = pos[nid]
                    d = math.hypot(q[0] - px, q[1] - py)
                    if d <= r * (1.0 + LINK_RTOL):
                        out.append((d, nid))
        out.sort()
        return out

    def same_component(self, u: int, v: int) -> bool:
        for x in (u, v):
            if x not in self.positions:
                raise KeyError(f"node {x} not in network")
        return self.uf.connected(u, v)

    def root(self, u: int):
        return self.uf.find(u)

    @property
    def n_components(self) -> int:
        return self.uf.count

    def records(self, kind_of=None) -> list[NodeRecord]:
        out = []
        for nid in sorted(self.positions):
            kind = kind_of(nid) if kind_of else NodeKind.ROUTER
            out.append(NodeRecord(nid, kind, self.positions[nid], self.status[nid], True))
        return out


def components_per_status(nodes: Sequence[NodeRecord], r_c: float) -> dict[int, int]:
    """Number of connected components of the subgraph induced by each status."""
    groups: dict[int, list[NodeRecord]] = defaultdict(list)
    for n in nodes:
        groups[n.status].append(n)
    return {s: n_components(build(grp, r_c)) for s, grp in sorted(groups.items())}
