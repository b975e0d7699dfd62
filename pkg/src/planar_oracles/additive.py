"""Additive-stretch oracle for graphs of diameter at most C * Delta.

Each recursion level divides its graph with shortest-path separators,
places equally spaced portals on every separator path, and stores
  * node -> portal distances for the portals on the node's own boundary, and
  * portal -> portal distances towards paths of ancestor separation steps.
A query routes through portals on the boundary of each endpoint and on the
paths that any connecting route must touch; pieces recurse, tiny pieces
answer exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import dijkstra as csgraph_dijkstra

from .graph import PlanarGraph, sssp
from .separators import Division, build_division


class DiameterError(ValueError):
    def __init__(self, u: int, v: int, d: int, bound: float) -> None:
        super().__init__(f"diameter precondition violated: d({u}, {v}) = {d} > {bound}")
        self.witness = (u, v, d)


class PieceContractError(ValueError):
    pass


@dataclass(frozen=True)
class PortalCover:
    path_id: int
    portals: tuple[int, ...]
    offsets: tuple[int, ...]
    spacing: int


def place_portals(nodes, offsets, spacing: int) -> tuple[list[int], list[int]]:
    """Pick path nodes so that consecutive portals are <= spacing apart (or adjacent)."""
    picks = [0]
    last = len(nodes) - 1
    for i in range(1, len(nodes)):
        if i == last or offsets[i + 1] - offsets[picks[-1]] > spacing:
            picks.append(i)
    return [nodes[i] for i in picks], [offsets[i] for i in picks]


class TinyPiece:
    """Exact distances inside a small piece (interior plus adjacent boundary nodes)."""

    depth = 0

    def __init__(self, g: PlanarGraph, interior, cache: int = 64) -> None:
        inner = set(interior)
        nodes = set(inner)
        for x in inner:
            nodes.update(y for y, _ in g.adj[x])
        self.graph, self.order = g.subgraph(sorted(nodes))
        self.local = {x: i for i, x in enumerate(self.order)}
        self.interior = inner
        self._rows: dict[int, np.ndarray] = {}
        self._cache = cache

    def query(self, u: int, v: int) -> float:
        if u not in self.interior or v not in self.interior:
            raise PieceContractError(f"nodes ({u}, {v}) are not both inside the piece")
        if u == v:
            return 0
        lu = self.local[u]
        row = self._rows.get(lu)
        if row is None:
            row = csgraph_dijkstra(self.graph.csr, directed=False, indices=lu)
            # bounded row cache; tolerant of concurrent readers evicting the same row
            if len(self._rows) >= self._cache:
                try:
                    self._rows.pop(next(iter(self._rows)), None)
                except (RuntimeError, StopIteration):
                    pass
            self._rows[lu] = row
        return float(row[self.local[v]])

    def words(self) -> int:
        return self.graph.n + 3 * self.graph.m

    def level_stats(self, level: int, out: list) -> None:
        while len(out) <= level:
            out.append(_empty_level())
        out[level]["exact_pieces"] += 1
        out[level]["words"] += self.words()


def tiny_piece_query(p: TinyPiece, u: int, v: int) -> float:
    return p.query(u, v)


def _empty_level() -> dict:
    return {"pieces": 0, "portals": 0, "stored_distances": 0, "exact_pieces": 0, "words": 0}


@dataclass
class AdditiveOracle:
    delta: float
    diameter_factor: float
    eps: float
    spacing: int
    division: Division
    covers: dict[int, PortalCover]
    node_portal: list[dict[int, np.ndarray]]
    tables: dict[tuple[int, int], np.ndarray]
    sub_oracles: dict[int, "AdditiveOracle | TinyPiece"]
    piece_local: dict[int, dict[int, int]]
    depth: int

    def _table(self, qa: int, qb: int) -> np.ndarray:
        t = self.tables.get((qa, qb))
        if t is not None:
            return t
        return self.tables[(qb, qa)].T

    def _reach(self, dists: dict[int, np.ndarray], target: int) -> np.ndarray:
        """Best distance from the node to each portal of ``target`` through its own portals."""
        best = None
        for q, arr in dists.items():
            vec = (arr[:, None] + self._table(q, target)).min(axis=0)
            best = vec if best is None else np.minimum(best, vec)
        return best

    def portal_estimate(self, u: int, v: int) -> float:
        div = self.division
        du, dv = self.node_portal[u], self.node_portal[v]
        best = math.inf
        for q in div.crossing_paths(div.home(u), div.home(v)):
            a = self._reach(du, q)
            b = self._reach(dv, q)
            if a is not None and b is not None:
                best = min(best, float((a + b).min()))
        return best

    def query(self, u: int, v: int) -> float:
        """Read-only: no per-query state is written."""
        if u == v:
            return 0
        best = self.portal_estimate(u, v)
        pu = self.division.node_to_piece[u]
        if pu >= 0 and pu == self.division.node_to_piece[v]:
            sub = self.sub_oracles[pu]
            loc = self.piece_local.get(pu)
            if loc is None:
                best = min(best, sub.query(u, v))
            else:
                best = min(best, sub.query(loc[u], loc[v]))
        return best

    def query_trace(self, u: int, v: int) -> dict:
        """Per-query statistics: recursion levels visited and portal pairs scanned."""
        div = self.division
        du, dv = self.node_portal[u], self.node_portal[v]
        pairs = 0
        for q in div.crossing_paths(div.home(u), div.home(v)):
            width = len(self.covers[q].portals)
            pairs += width * (sum(len(x) for x in du.values()) + sum(len(x) for x in dv.values()))
        out = {"levels": 1, "portal_pairs": pairs}
        pu = div.node_to_piece[u]
        if u != v and pu >= 0 and pu == div.node_to_piece[v]:
            sub = self.sub_oracles[pu]
            if isinstance(sub, AdditiveOracle):
                loc = self.piece_local[pu]
                inner = sub.query_trace(loc[u], loc[v])
                out["levels"] += inner["levels"]
                out["portal_pairs"] += inner["portal_pairs"]
            else:
                out["levels"] += 1
        return out

    def words(self) -> int:
        own = sum(a.size for d in self.node_portal for a in d.values())
        own += sum(t.size for t in self.tables.values())
        own += sum(len(c.portals) for c in self.covers.values())
        return own + sum(s.words() for s in self.sub_oracles.values())

    def level_stats(self, level: int, out: list) -> None:
        while len(out) <= level:
            out.append(_empty_level())
        row = out[level]
        row["pieces"] += len(self.division.pieces)
        row["portals"] += sum(len(c.portals) for c in self.covers.values())
        stored = sum(a.size for d in self.node_portal for a in d.values())
        stored += sum(t.size for t in self.tables.values())
        row["stored_distances"] += stored
        row["words"] += stored + sum(len(c.portals) for c in self.covers.values())
        for s in self.sub_oracles.values():
            s.level_stats(level + 1, out)

    def stats(self) -> dict:
        levels: list = []
        self.level_stats(0, levels)
        return {
            "oracle": "additive",
            "delta": self.delta,
            "diameter_factor": self.diameter_factor,
            "eps": self.eps,
            "spacing": self.spacing,
            "depth": self.depth,
            "levels": levels,
            "words": self.words(),
        }


class ExactOnly(TinyPiece):
    """Whole-graph fallback when a level graph is already tiny or cannot be divided."""

    def __init__(self, g: PlanarGraph) -> None:
        super().__init__(g, range(g.n))

    def stats(self) -> dict:
        return {"oracle": "additive", "depth": 0, "words": self.words(), "levels": []}


def validate_diameter(g: PlanarGraph, bound: float, mode: str = "exact", seed: int = 0) -> int:
    """Return a diameter (exact) or lower bound (sampled); raise if it exceeds ``bound``."""
    if mode == "exact":
        d = csgraph_dijkstra(g.csr, directed=False)
        u, v = np.unravel_index(np.argmax(d), d.shape)
        diam = int(d[u, v])
    else:
        rng = random.Random(seed)
        starts = [0] + [rng.randrange(g.n) for _ in range(8)]
        diam, u, v = 0, 0, 0
        for s in starts:
            dist = sssp(g, s).dist
            far = max(range(g.n), key=dist.__getitem__)
            # second sweep from the farthest node
            dist2 = sssp(g, far).dist
            far2 = max(range(g.n), key=dist2.__getitem__)
            if dist2[far2] > diam:
                diam, u, v = dist2[far2], far, far2
    if diam > bound:
        raise DiameterError(int(u), int(v), diam, bound)
    return diam


def build_additive(
    g: PlanarGraph,
    delta: float,
    diameter_factor: float,
    eps: float,
    validate: str | None = "sampled",
    boundary_cap: int = 10,
) -> "AdditiveOracle | ExactOnly":
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if validate:
        validate_diameter(g, diameter_factor * delta, validate)
    return _build(g, delta, diameter_factor, eps, boundary_cap)


def _build(g, delta, diameter_factor, eps, boundary_cap):
    tiny = math.ceil(eps**-2)
    # zero spacing means every path node is a portal: the answer is exact anyway
    if g.n <= tiny or math.floor(eps * delta) == 0:
        return ExactOnly(g)
    div = build_division(g, eps, boundary_cap=boundary_cap)
    if not div.paths:
        return ExactOnly(g)
    spacing = math.floor(eps * delta)

    covers: dict[int, PortalCover] = {}
    for q in div.paths:
        offs = [div.spt.dist[x] for x in q.nodes]
        nodes, offsets = place_portals(q.nodes, offs, spacing)
        covers[q.path_id] = PortalCover(q.path_id, tuple(nodes), tuple(offsets), spacing)

    portal_nodes = sorted({x for c in covers.values() for x in c.portals})
    row_of = {x: i for i, x in enumerate(portal_nodes)}
    dist = csgraph_dijkstra(g.csr, directed=False, indices=np.array(portal_nodes))
    idx = {q: np.array([row_of[x] for x in c.portals]) for q, c in covers.items()}
    cols = {q: np.array(c.portals) for q, c in covers.items()}

    node_portal: list[dict[int, np.ndarray]] = []
    for x in range(g.n):
        kind, i = div.home(x)
        qs = div.pieces[i].boundary if kind == "piece" else (div.node_to_path[x],)
        node_portal.append({q: dist[idx[q], x] for q in qs})

    tables: dict[tuple[int, int], np.ndarray] = {}
    for qa in covers:
        for s in div.step_chain(div.paths[qa].step):
            for qb in div.steps[s].paths:
                if (qb, qa) not in tables:
                    tables[(qa, qb)] = dist[np.ix_(idx[qa], cols[qb])]
    sub_oracles: dict = {}
    piece_local: dict[int, dict[int, int]] = {}
    depth = 1
    for p in div.pieces:
        if len(p.node_set) > tiny and len(p.node_set) < g.n:
            sg, order = g.subgraph(p.node_set)
            sub = _build(sg, delta, diameter_factor, eps, boundary_cap)
            piece_local[p.piece_id] = {x: i for i, x in enumerate(order)}
            sub_oracles[p.piece_id] = sub
            depth = max(depth, 1 + sub.depth)
        else:
            sub_oracles[p.piece_id] = TinyPiece(g, p.node_set)
    return AdditiveOracle(
        delta, diameter_factor, eps, spacing, div, covers, node_portal, tables,
        sub_oracles, piece_local, depth,
    )
