"""Deterministic planar test instances with embeddings built in."""

from __future__ import annotations

import random

from .graph import GraphError, PlanarGraph

MAX_ATTEMPTS = 50


def _grid_rotation(rows: int, cols: int, present) -> tuple[tuple[int, ...], ...]:
    rot = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            ring = []
            # clockwise: up, right, down, left
            for dr, dc in ((-1, 0), (0, 1), (1, 0), (0, -1)):
                rr, cc = r + dr, c + dc
                if 0 <= rr < rows and 0 <= cc < cols:
                    y = rr * cols + cc
                    if present(v, y):
                        ring.append(y)
            rot.append(tuple(ring))
    return tuple(rot)


def _grid_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    out = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                out.append((v, v + 1))
            if r + 1 < rows:
                out.append((v, v + cols))
    return out


def grid(rows: int, cols: int) -> PlanarGraph:
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    edges = tuple((u, v, 1) for u, v in _grid_edges(rows, cols))
    return PlanarGraph(rows * cols, edges, _grid_rotation(rows, cols, lambda a, b: True))


def random_weighted_grid(rows: int, cols: int, max_w: int, seed: int) -> PlanarGraph:
    if rows < 1 or cols < 1 or max_w < 1:
        raise ValueError("rows, cols and max_w must be >= 1")
    rng = random.Random(seed)
    pairs = _grid_edges(rows, cols)
    ws = [rng.randint(1, max_w) for _ in pairs]
    ws[0:1] = [1] if ws else []  # keep the minimum weight at 1 (normalized)
    edges = tuple((u, v, w) for (u, v), w in zip(pairs, ws))
    return PlanarGraph(rows * cols, edges, _grid_rotation(rows, cols, lambda a, b: True))


def deleted_grid(rows: int, cols: int, delete_fraction: float, seed: int) -> PlanarGraph:
    """Grid with a fraction of edges removed; deletions that disconnect are skipped."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    if not 0 <= delete_fraction < 1:
        raise ValueError("delete_fraction must lie in [0, 1)")
    pairs = _grid_edges(rows, cols)
    target = int(round(delete_fraction * len(pairs)))
    for attempt in range(MAX_ATTEMPTS):
        rng = random.Random(seed * 7919 + attempt)
        keep = set(pairs)
        order = pairs[:]
        rng.shuffle(order)
        removed = 0
        for e in order:
            if removed == target:
                break
            keep.discard(e)
            if _connected(rows * cols, keep):
                removed += 1
            else:
                keep.add(e)
        if removed == target:
            edges = tuple((u, v, 1) for u, v in sorted(keep))
            rot = _grid_rotation(rows, cols, lambda a, b: (min(a, b), max(a, b)) in keep)
            return PlanarGraph(rows * cols, edges, rot)
    raise GraphError(f"could not delete {target} edges without disconnecting after {MAX_ATTEMPTS} attempts")


def _connected(n: int, edges) -> bool:
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def with_heavy_edge(g: PlanarGraph, weight: int, index: int = 0) -> PlanarGraph:
    """Copy of ``g`` with one edge's weight replaced (polynomial-weight instances)."""
    edges = list(g.edges)
    u, v, _ = edges[index]
    edges[index] = (u, v, weight)
    return PlanarGraph(g.n, tuple(edges), g.rotation)


def parse_spec(spec: str) -> PlanarGraph:
    """Parse generator strings like ``grid:10x10``, ``wgrid:8x8:5:1``, ``dgrid:10x10:0.2:3``."""
    kind, _, rest = spec.partition(":")
    parts = rest.split(":") if rest else []
    try:
        rows, cols = (int(x) for x in parts[0].lower().split("x"))
        if kind == "grid":
            return grid(rows, cols)
        if kind == "wgrid":
            return random_weighted_grid(rows, cols, int(parts[1]), int(parts[2]) if len(parts) > 2 else 0)
        if kind == "dgrid":
            return deleted_grid(rows, cols, float(parts[1]), int(parts[2]) if len(parts) > 2 else 0)
        if kind == "pgrid":
            g = grid(rows, cols)
            return with_heavy_edge(g, g.n * g.n, int(parts[1]) if len(parts) > 1 else 0)
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad generator spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown generator kind {kind!r}")
