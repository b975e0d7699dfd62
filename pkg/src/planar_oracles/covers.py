"""Landmark (distance-delta dominating) sets and leveled neighbourhood covers."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .graph import PlanarGraph, dijkstra, sssp


@dataclass(frozen=True)
class DominatingSet:
    delta: int
    landmarks: tuple[int, ...]
    nearest: tuple[tuple[int, int], ...]  # per node: (landmark, distance)


def dominating_set(g: PlanarGraph, delta: int, root: int = 0) -> DominatingSet:
    """Every node ends up within ``delta`` of a landmark.

    On unit weights the greedy claims whole subtrees of at least delta+1
    nodes of a BFS tree per landmark, which gives |L| <= n/(delta+1) whenever
    n > delta.  Weighted graphs use truncated Dijkstra balls instead.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    spt = sssp(g, root)
    if all(w == 1 for _, _, w in g.edges):
        marks = _tree_greedy(g.n, spt.parent, spt.dist, delta, root)
    else:
        marks = _weighted_greedy(g, spt, delta)
    landmarks = tuple(sorted(marks))
    return DominatingSet(delta, landmarks, _nearest(g, landmarks))


def _tree_greedy(n: int, parent, dist, delta: int, root: int) -> set[int]:
    children: list[list[int]] = [[] for _ in range(n)]
    for x in range(n):
        if parent[x] >= 0:
            children[parent[x]].append(x)
    order = sorted(range(n), key=lambda x: (-dist[x], x))
    alive = [True] * n
    size = [1] * n  # alive subtree size
    for x in order:
        if parent[x] >= 0:
            size[parent[x]] += size[x]
    marks = set()
    # deepest node whose alive subtree reaches delta+1 nodes; its children's subtrees are shallower than delta
    for x in order:
        if not alive[x] or size[x] < delta + 1:
            continue
        marks.add(x)
        removed = _kill(x, children, alive)
        p = parent[x]
        while p >= 0:
            size[p] -= removed
            p = parent[p]
    # Leftovers form the root's alive subtree (< delta+1 nodes).  Some pick hangs
    # directly below it and reaches every leftover within delta hops.
    if not marks:
        marks.add(root)
    return marks


def _kill(x: int, children, alive) -> int:
    stack = [x]
    count = 0
    while stack:
        y = stack.pop()
        if not alive[y]:
            continue
        alive[y] = False
        count += 1
        stack.extend(children[y])
    return count


def _weighted_greedy(g: PlanarGraph, spt, delta: int) -> set[int]:
    covered = [False] * g.n
    marks = set()
    for v in sorted(range(g.n), key=lambda x: (-spt.dist[x], x)):
        if covered[v]:
            continue
        a = v
        while spt.parent[a] >= 0 and spt.dist[v] - spt.dist[spt.parent[a]] <= delta:
            a = spt.parent[a]
        marks.add(a)
        ball, _ = dijkstra(g.adj, a, delta)
        for x in ball:
            covered[x] = True
    return marks


def _nearest(g: PlanarGraph, sources) -> tuple[tuple[int, int], ...]:
    """Multi-source Dijkstra; ties go to the lowest landmark id."""
    best: dict[int, tuple[int, int]] = {}
    heap = [(0, s, s) for s in sources]
    heapq.heapify(heap)
    while heap:
        d, lm, x = heapq.heappop(heap)
        if x in best:
            continue
        best[x] = (lm, d)
        for y, w in g.adj[x]:
            if y not in best:
                heapq.heappush(heap, (d + w, lm, y))
    return tuple(best[x] for x in range(g.n))


@dataclass(frozen=True)
class Cluster:
    center: int
    nodes: tuple[int, ...]
    depth: int  # depth of the shortest-path tree from the center inside the cluster


@dataclass
class CoverLevel:
    level: int
    radius: int
    clusters: list[Cluster]
    membership: list[tuple[int, ...]]  # per node, sorted cluster ids
    home: tuple[int, ...] = ()  # per node, the cluster grown from its own cell

    @property
    def max_membership(self) -> int:
        return max(len(m) for m in self.membership)

    @property
    def max_depth(self) -> int:
        return max(c.depth for c in self.clusters)


@dataclass
class CoverHierarchy:
    levels: dict[int, CoverLevel]
    rho: float
    degree_bound: int

    @property
    def top(self) -> int:
        return max(self.levels)

    def stats(self) -> list[dict]:
        return [
            {
                "level": i,
                "radius": lv.radius,
                "subgraphs": len(lv.clusters),
                "max_membership": lv.max_membership,
                "max_tree_depth": lv.max_depth,
            }
            for i, lv in sorted(self.levels.items())
        ]

    def words(self) -> int:
        return sum(len(m) + 1 for lv in self.levels.values() for m in lv.membership)


def build_cover(g: PlanarGraph, radius: int, level: int = 0) -> CoverLevel:
    """One cover: Voronoi cells of a greedy radius-net, each grown by ``radius``.

    A node's radius-ball lies inside the grown cell of its own cell, the
    grown cell keeps a center tree of depth <= 2*radius, and a node joins
    only clusters whose cell meets its ball.
    """
    centers = []
    covered = [False] * g.n
    for v in range(g.n):
        if not covered[v]:
            centers.append(v)
            ball, _ = dijkstra(g.adj, v, radius)
            for x in ball:
                covered[x] = True
    owner = _nearest(g, centers)
    cells: dict[int, list[int]] = {c: [] for c in centers}
    for x, (c, _) in enumerate(owner):
        cells[c].append(x)
    clusters = []
    membership: list[list[int]] = [[] for _ in range(g.n)]
    for cid, c in enumerate(centers):
        grown = _multi_ball(g, cells[c], radius)
        nodes = tuple(sorted(grown))
        sub, order = g.subgraph(nodes)
        depth = max(sssp(sub, order.index(c)).dist)
        clusters.append(Cluster(c, nodes, depth))
        for x in nodes:
            membership[x].append(cid)
    cid_of = {c: i for i, c in enumerate(centers)}
    home = tuple(cid_of[c] for c, _ in owner)
    return CoverLevel(level, radius, clusters, [tuple(m) for m in membership], home)


def _multi_ball(g: PlanarGraph, sources, radius: int) -> set[int]:
    dist = {s: 0 for s in sources}
    heap = [(0, s) for s in sources]
    heapq.heapify(heap)
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        for y, w in g.adj[x]:
            nd = d + w
            if nd <= radius and nd < dist.get(y, math.inf):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return done


def level_range(g: PlanarGraph, eps: float, delta: int, top: int | None = None) -> list[int]:
    """Levels i >= 1 with 2^i <= ceil(2 delta / eps), cut once one cluster spans the graph."""
    bound = math.ceil(2 * delta / eps)
    levels = []
    i = 1
    ecc = max(sssp(g, 0).dist)
    while (1 << i) <= bound if top is None else i <= top:
        levels.append(i)
        if (1 << i) >= 2 * ecc:
            break
        i += 1
    if not levels:
        levels = [1]
    return levels


def build_cover_hierarchy(
    g: PlanarGraph, eps: float, delta: int, top: int | None = None
) -> CoverHierarchy:
    levels = {i: build_cover(g, 1 << i, i) for i in level_range(g, eps, delta, top)}
    rho = max(lv.max_depth / lv.radius for lv in levels.values())
    degree = max(lv.max_membership for lv in levels.values())
    return CoverHierarchy(levels, rho, degree)


def shared_subgraph(h: CoverHierarchy, level: int, u: int, v: int) -> int | None:
    lv = h.levels[level]
    a, b = lv.membership[u], lv.membership[v]
    common = set(a).intersection(b)
    return min(common) if common else None
