"""Planar graph substrate: representation, embedding, shortest paths and the
exact baseline oracle."""

from __future__ import annotations

import heapq
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx
import numpy as np
from networkx.algorithms.planar_drawing import triangulate_embedding
from scipy.sparse import csr_matrix

UNREACHABLE = -1


class GraphError(ValueError):
    """Invalid graph contents (bad ids, self-loops, weights)."""


class NonPlanarError(GraphError):
    """Raised when a graph admits no planar embedding."""


@dataclass(frozen=True)
class WeightClass:
    kind: str = "unit"  # unit | moderate | polynomial
    theta: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("unit", "moderate", "polynomial"):
            raise ValueError(f"unknown weight class {self.kind!r}")
        if self.theta < 0:
            raise ValueError("theta must be non-negative")

    def moderate_constant(self, g: "PlanarGraph") -> float:
        """Smallest c with total weight <= c * n * log2(n)**theta."""
        n = max(g.n, 2)
        return g.total_weight / (n * math.log2(n) ** self.theta)

    def check(self, g: "PlanarGraph", c_max: float = 3.0) -> float:
        if self.kind == "unit":
            if any(w != 1 for _, _, w in g.edges):
                raise GraphError("unit weight class requires all weights equal to 1")
            return 1.0
        if self.kind == "moderate":
            c = self.moderate_constant(g)
            if c > c_max:
                raise GraphError(
                    f"total weight {g.total_weight} exceeds {c_max} * n * log^{self.theta} n "
                    f"(measured constant {c:.3f})"
                )
            return c
        return self.moderate_constant(g)


@dataclass(eq=False)
class PlanarGraph:
    """Undirected graph with integral weights and an optional rotation system.

    ``rotation[v]`` lists the neighbours of ``v`` in cyclic (clockwise) order.
    ``fill`` holds edges added by triangulation; they carry a weight larger
    than any simple path so they never enter a shortest path.
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]
    rotation: tuple[tuple[int, ...], ...] | None = None
    fill: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GraphError("graph needs at least one node")
        canon = []
        seen = set()
        for u, v, w in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) has an endpoint out of range")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if w < 1 or int(w) != w:
                raise GraphError(f"edge ({u}, {v}) has weight {w}; weights must be integers >= 1")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            canon.append((key[0], key[1], int(w)))
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @classmethod
    def trusted(cls, n, edges, rotation=None, fill=frozenset()) -> "PlanarGraph":
        """Skip validation; ``edges`` must already be sorted (u < v, w >= 1) tuples."""
        g = cls.__new__(cls)
        g.n, g.edges, g.rotation, g.fill = n, edges, rotation, fill
        return g

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def normalized(self) -> bool:
        return not self.edges or min(w for _, _, w in self.edges) == 1

    @cached_property
    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)

    @cached_property
    def max_weight(self) -> int:
        return max((w for _, _, w in self.edges), default=1)

    @cached_property
    def adj(self) -> list[list[tuple[int, int]]]:
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            out[u].append((v, w))
            out[v].append((u, w))
        for row in out:
            row.sort()
        return out

    @cached_property
    def weight(self) -> dict[tuple[int, int], int]:
        return {(u, v): w for u, v, w in self.edges}

    def edge_weight(self, u: int, v: int) -> int:
        return self.weight[(u, v) if u < v else (v, u)]

    @cached_property
    def csr(self) -> csr_matrix:
        if not self.edges:
            return csr_matrix((self.n, self.n), dtype=np.float64)
        e = np.array(self.edges, dtype=np.int64)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        vals = np.concatenate([e[:, 2], e[:, 2]]).astype(np.float64)
        return csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def rotation_index(self) -> list[dict[int, int]]:
        """Position of each neighbour in ``rotation[v]``."""
        return [{x: i for i, x in enumerate(r)} for r in self.rotation]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_weighted_edges_from(self.edges)
        return g

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                x = stack.pop()
                comp.append(x)
                for y, _ in self.adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def faces(self) -> list[list[tuple[int, int]]]:
        """Face boundaries as dart cycles traced through the rotation system."""
        if self.rotation is None:
            raise GraphError("graph has no embedding")
        pos = [{x: i for i, x in enumerate(r)} for r in self.rotation]
        seen: set[tuple[int, int]] = set()
        faces = []
        for u in range(self.n):
            for v in self.rotation[u]:
                if (u, v) in seen:
                    continue
                face = []
                a, b = u, v
                while (a, b) not in seen:
                    seen.add((a, b))
                    face.append((a, b))
                    rot = self.rotation[b]
                    a, b = b, rot[(pos[b][a] + 1) % len(rot)]
                faces.append(face)
        return faces

    def euler_ok(self) -> bool:
        """Euler's formula per component, counting faces from the rotation system."""
        faces = self.faces()
        comp_of = [0] * self.n
        comps = self.components()
        for i, comp in enumerate(comps):
            for x in comp:
                comp_of[x] = i
        f = [0] * len(comps)
        for face in faces:
            f[comp_of[face[0][0]]] += 1
        nn = [len(c) for c in comps]
        mm = [0] * len(comps)
        for u, _, _ in self.edges:
            mm[comp_of[u]] += 1
        for i in range(len(comps)):
            faces_i = f[i] if mm[i] else 1  # isolated node: one outer face
            if nn[i] - mm[i] + faces_i != 2:
                return False
        return True

    def face_count(self) -> int:
        return len(self.faces())

    def subgraph(self, nodes: Sequence[int]) -> tuple["PlanarGraph", list[int]]:
        """Induced subgraph relabelled to 0..k-1; returns it and the local->global map."""
        order = sorted(nodes)
        local = {x: i for i, x in enumerate(order)}
        es = [
            (local[x], local[y], w)
            for x in order
            for y, w in self.adj[x]
            if x < y and y in local
        ]
        rot = None
        if self.rotation is not None:
            rot = tuple(tuple(local[y] for y in self.rotation[x] if y in local) for x in order)
        # order is sorted and adj rows are sorted, so es is already canonical
        return PlanarGraph.trusted(len(order), tuple(es), rot), order


def from_edges(n: int, edges: Iterable[tuple[int, int, int]]) -> PlanarGraph:
    return PlanarGraph(n, tuple(edges))


def embed(g: PlanarGraph) -> PlanarGraph:
    """Attach a planar rotation system, or raise NonPlanarError."""
    if g.m > 3 * g.n - 6 and g.n >= 3:
        raise NonPlanarError(f"non-planar: {g.m} edges exceed 3n-6 = {3 * g.n - 6}")
    ok, emb = nx.check_planarity(g.to_networkx(), counterexample=True)
    if not ok:
        kur = sorted(emb.nodes())
        raise NonPlanarError(f"non-planar: Kuratowski subgraph on nodes {kur}")
    rot = tuple(tuple(emb.neighbors_cw_order(v)) if emb.degree(v) else () for v in range(g.n))
    return PlanarGraph(g.n, g.edges, rot, g.fill)


def infinity_surrogate(g: PlanarGraph) -> int:
    return 1 + g.n * g.max_weight


def triangulate(g: PlanarGraph) -> PlanarGraph:
    """Add fill edges until every face is a triangle.

    Fill edges carry ``infinity_surrogate(g)``; node ids are kept.  Faces
    that revisit a node are first patched to make the graph biconnected,
    then every face is fanned out, skipping chords that already exist.
    """
    if g.n < 3:
        return g if g.rotation is not None else embed(g)
    if g.rotation is None:
        g = embed(g)
    if not g.is_connected():
        return _triangulate_nx(g)
    emb = _Rotation(g.rotation)
    visited: set[tuple[int, int]] = set()
    faces = []
    for v in range(g.n):
        for w in emb.cw_order(v):
            face = emb.make_biconnected(v, w, visited)
            if face:
                faces.append(face)
    for face in faces:
        emb.triangulate_face(face[0], face[1])
    big = infinity_surrogate(g)
    edges = list(g.edges)
    fill = set(g.fill)
    for u, v in emb.added:
        key = (u, v) if u < v else (v, u)
        edges.append((key[0], key[1], big))
        fill.add(key)
    rot = tuple(tuple(emb.cw_order(v)) for v in range(g.n))
    return PlanarGraph.trusted(g.n, tuple(sorted(edges)), rot, frozenset(fill))


class _Rotation:
    """Mutable rotation system with O(1) insertion (cw/ccw successor maps)."""

    def __init__(self, rotation) -> None:
        self.cw: list[dict[int, int]] = []
        self.ccw: list[dict[int, int]] = []
        self.first = []
        for r in rotation:
            d = len(r)
            self.cw.append({r[i]: r[(i + 1) % d] for i in range(d)})
            self.ccw.append({r[i]: r[i - 1] for i in range(d)})
            self.first.append(r[0] if d else None)
        self.added: list[tuple[int, int]] = []

    def cw_order(self, v: int) -> list[int]:
        x = self.first[v]
        if x is None:
            return []
        out = [x]
        y = self.cw[v][x]
        while y != x:
            out.append(y)
            y = self.cw[v][y]
        return out

    def next_face(self, v: int, w: int) -> tuple[int, int]:
        return w, self.ccw[w][v]

    def _insert(self, start: int, end: int, cw_ref=None, ccw_ref=None) -> None:
        cw, ccw = self.cw[start], self.ccw[start]
        if cw_ref is not None:
            # new edge sits right counter-clockwise of cw_ref
            other = ccw[cw_ref]
            cw[end], ccw[end] = cw_ref, other
            cw[other] = end
            ccw[cw_ref] = end
        else:
            other = cw[ccw_ref]
            cw[end], ccw[end] = other, ccw_ref
            ccw[other] = end
            cw[ccw_ref] = end

    def add_edge(self, a: int, b: int, at_a: dict, at_b: dict) -> None:
        self._insert(a, b, **at_a)
        self._insert(b, a, **at_b)
        self.added.append((a, b))

    def make_biconnected(self, start: int, out: int, counted: set) -> list[int]:
        if (start, out) in counted:
            return []
        counted.add((start, out))
        v1, v2 = start, out
        face = [start]
        face_set = {start}
        _, v3 = self.next_face(v1, v2)
        while v2 != start or v3 != out:
            if v2 in face_set:
                # face passes v2 twice: a cut vertex, bridge around it
                self.add_edge(v1, v3, {"ccw_ref": v2}, {"cw_ref": v2})
                counted.add((v2, v3))
                counted.add((v3, v1))
                v2 = v1
            else:
                face_set.add(v2)
                face.append(v2)
            v1 = v2
            v2, v3 = self.next_face(v2, v3)
            counted.add((v1, v2))
        return face

    def triangulate_face(self, v1: int, v2: int) -> None:
        _, v3 = self.next_face(v1, v2)
        _, v4 = self.next_face(v2, v3)
        if v1 in (v2, v3):
            return
        while v1 != v4:
            if v3 in self.cw[v1]:
                v1, v2, v3 = v2, v3, v4
            else:
                self.add_edge(v1, v3, {"ccw_ref": v2}, {"cw_ref": v2})
                v1, v2, v3 = v1, v3, v4
            _, v4 = self.next_face(v2, v3)


def _triangulate_nx(g: PlanarGraph) -> PlanarGraph:
    """networkx fallback for disconnected inputs (it also links components)."""
    emb = nx.PlanarEmbedding()
    for v in range(g.n):
        emb.add_node(v)
        prev = None
        for x in g.rotation[v]:
            if prev is None:
                emb.add_half_edge(v, x)
            else:
                emb.add_half_edge(v, x, cw=prev)
            prev = x
    tri, _ = triangulate_embedding(emb, True)
    big = infinity_surrogate(g)
    edges = list(g.edges)
    fill = set(g.fill)
    for u, v in tri.edges():
        if u < v and (u, v) not in g.weight:
            edges.append((u, v, big))
            fill.add((u, v))
    rot = tuple(tuple(tri.neighbors_cw_order(v)) for v in range(g.n))
    return PlanarGraph(g.n, tuple(edges), rot, frozenset(fill))


@dataclass(frozen=True)
class ShortestPathTree:
    root: int
    parent: tuple[int, ...]  # -1 for the root and unreachable nodes
    dist: tuple[int, ...]  # UNREACHABLE for unreachable nodes

    def path_to_root(self, x: int) -> list[int]:
        out = [x]
        while self.parent[x] >= 0:
            x = self.parent[x]
            out.append(x)
        return out

    def is_relaxed(self, g: PlanarGraph) -> bool:
        for u, v, w in g.edges:
            du, dv = self.dist[u], self.dist[v]
            if du == UNREACHABLE or dv == UNREACHABLE:
                if (du == UNREACHABLE) != (dv == UNREACHABLE):
                    return False
                continue
            if du + w < dv or dv + w < du:
                return False
        return True


def dijkstra(adj: Sequence[Sequence[tuple[int, int]]], source: int, limit: float = math.inf):
    """Plain Dijkstra; ties on equal keys go to the lowest node id.

    Returns (dist dict, parent dict) restricted to nodes within ``limit``.
    """
    dist = {source: 0}
    parent = {source: -1}
    done = set()
    heap = [(0, source)]
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        for y, w in adj[x]:
            nd = d + w
            if nd > limit:
                continue
            old = dist.get(y)
            if old is None or nd < old:
                dist[y] = nd
                parent[y] = x
                heapq.heappush(heap, (nd, y))
    return {x: dist[x] for x in done}, {x: parent[x] for x in done}


def sssp(g: PlanarGraph, source: int) -> ShortestPathTree:
    if not 0 <= source < g.n:
        raise GraphError(f"source {source} out of range")
    dist, parent = dijkstra(g.adj, source)
    return ShortestPathTree(
        source,
        tuple(parent.get(x, -1) for x in range(g.n)),
        tuple(dist.get(x, UNREACHABLE) for x in range(g.n)),
    )


class ExactOracle:
    """Ground-truth distances by on-demand Dijkstra with an LRU of sources."""

    def __init__(self, g: PlanarGraph, cache_size: int = 256) -> None:
        self.g = g
        self.cache_size = cache_size
        self._rows: OrderedDict[int, tuple[int, ...]] = OrderedDict()

    def row(self, u: int) -> tuple[int, ...]:
        r = self._rows.get(u)
        if r is None:
            r = sssp(self.g, u).dist
            self._rows[u] = r
            if len(self._rows) > self.cache_size:
                self._rows.popitem(last=False)
        else:
            self._rows.move_to_end(u)
        return r

    def distance(self, u: int, v: int) -> int:
        if u == v:
            return 0
        return self.row(u)[v]

    def stats(self) -> dict:
        return {"oracle": "exact", "words": {"graph": 3 * self.g.m + self.g.n}}


def exact_distance(g: PlanarGraph, u: int, v: int) -> int:
    if u == v:
        return 0
    return sssp(g, u).dist[v]


def eccentricity(g: PlanarGraph, source: int) -> int:
    return max(sssp(g, source).dist)


def log_star(n: float) -> int:
    k = 0
    while n > 1:
        n = math.log2(n)
        k += 1
    return k
