"""Shortest-path separators and the shortest-path division.

A separator is three root-paths of one shortest-path tree.  The division
splits the graph repeatedly with such separators until every piece is small
and touches few separator paths; the separation steps form the
decomposition tree.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .graph import PlanarGraph, ShortestPathTree, embed, sssp, triangulate


def fundamental_cycle_separator(
    h: PlanarGraph, parent: Sequence[int], weights: Sequence[float]
) -> tuple[int, ...]:
    """Find up to three vertices whose root-paths split ``h`` into light components.

    ``h`` must be triangulated and embedded, ``parent`` a spanning tree of
    ``h`` (root has parent -1).  Every component left after deleting the
    three root-paths weighs at most half of ``sum(weights)``.
    """
    if h.n <= 3:
        return tuple(range(h.n))
    faces = h.faces()
    face_of: dict[tuple[int, int], int] = {}
    for fid, face in enumerate(faces):
        for dart in face:
            face_of[dart] = fid
    tree = {(min(x, p), max(x, p)) for x, p in enumerate(parent) if p >= 0}

    nf = len(faces)
    dual: list[list[int]] = [[] for _ in range(nf)]
    for u, v, _ in h.edges:
        if (u, v) not in tree:
            a, b = face_of[(u, v)], face_of[(v, u)]
            dual[a].append(b)
            dual[b].append(a)
    for row in dual:
        row.sort()

    # root the cotree (a spanning tree of the dual) at face 0
    fpar = [-1] * nf
    depth = [0] * nf
    order = [0]
    seen = [False] * nf
    seen[0] = True
    for f in order:
        for g2 in dual[f]:
            if not seen[g2]:
                seen[g2] = True
                fpar[g2] = f
                depth[g2] = depth[f] + 1
                order.append(g2)
    tin = [0] * nf
    for i, f in enumerate(_preorder(nf, fpar, dual)):
        tin[f] = i

    up = [fpar[:]]
    up[0] = [p if p >= 0 else f for f, p in enumerate(fpar)]
    k = 1
    while (1 << k) <= nf:
        prev = up[-1]
        up.append([prev[prev[f]] for f in range(nf)])
        k += 1

    def lca(a: int, b: int) -> int:
        if depth[a] < depth[b]:
            a, b = b, a
        diff = depth[a] - depth[b]
        j = 0
        while diff:
            if diff & 1:
                a = up[j][a]
            diff >>= 1
            j += 1
        if a == b:
            return a
        for j in range(len(up) - 1, -1, -1):
            if up[j][a] != up[j][b]:
                a, b = up[j][a], up[j][b]
        return up[0][a]

    # a node lies strictly inside a cotree subtree's region iff all its faces do
    acc = [0.0] * nf
    for v in range(h.n):
        if not weights[v]:
            continue
        fs = [face_of[(v, x)] for x in h.rotation[v]]
        lo = min(fs, key=tin.__getitem__)
        hi = max(fs, key=tin.__getitem__)
        acc[lca(lo, hi)] += weights[v]
    sub = acc[:]
    for f in reversed(order):
        if fpar[f] >= 0:
            sub[fpar[f]] += sub[f]
    total = float(sum(weights))

    children: list[list[int]] = [[] for _ in range(nf)]
    for f in order[1:]:
        children[fpar[f]].append(f)
    f = 0
    while True:
        heavy = [c for c in children[f] if sub[c] > total / 2]
        if not heavy:
            break
        f = heavy[0]
    return tuple(sorted({a for a, _ in faces[f]}))


def _preorder(nf: int, fpar: list[int], dual: list[list[int]]) -> list[int]:
    out = []
    stack = [0]
    while stack:
        f = stack.pop()
        out.append(f)
        for g2 in reversed(dual[f]):
            if fpar[g2] == f:
                stack.append(g2)
    return out


@dataclass(frozen=True)
class SeparatorPath:
    path_id: int
    nodes: tuple[int, ...]  # root first, so offsets are tree distances
    length: int
    tree_level: int
    step: int
    private: tuple[int, ...]  # nodes first removed by this path


@dataclass(frozen=True)
class Step:
    """One separation in the decomposition tree."""

    step_id: int
    parent: int  # -1 at the root
    depth: int
    paths: tuple[int, ...]
    boundary: tuple[int, ...]  # boundary paths of the piece that was split
    size: int
    balance: float  # heaviest remaining component / total weight
    endpoint_weighting: bool


@dataclass(frozen=True)
class Piece:
    piece_id: int
    node_set: tuple[int, ...]
    boundary: tuple[int, ...]
    parent: int  # step id, -1 if the piece is the whole graph


@dataclass
class Division:
    g: PlanarGraph
    eps: float
    boundary_cap: int
    size_cap: int
    spt: ShortestPathTree
    paths: list[SeparatorPath]
    steps: list[Step]
    pieces: list[Piece]
    node_to_piece: list[int]  # -1 for separator nodes
    node_to_path: list[int]  # private path of separator nodes, else -1
    max_boundary_seen: int = 0
    _chains: dict = field(default_factory=dict, repr=False)

    @property
    def depth(self) -> int:
        return max((s.depth + 1 for s in self.steps), default=0)

    def home(self, x: int) -> tuple[str, int]:
        p = self.node_to_piece[x]
        if p >= 0:
            return ("piece", p)
        return ("step", self.paths[self.node_to_path[x]].step)

    def step_chain(self, step: int) -> list[int]:
        c = self._chains.get(step)
        if c is None:
            c = []
            s = step
            while s >= 0:
                c.append(s)
                s = self.steps[s].parent
            self._chains[step] = c
        return c

    def chain(self, home: tuple[str, int]) -> list[int]:
        kind, i = home
        if kind == "piece":
            return self.step_chain(self.pieces[i].parent)
        return self.step_chain(i)

    def lca_step(self, a: tuple[str, int], b: tuple[str, int]) -> int:
        ca, cb = self.chain(a), set(self.chain(b))
        for s in ca:
            if s in cb:
                return s
        return -1

    def crossing_paths(self, a: tuple[str, int], b: tuple[str, int]) -> tuple[int, ...]:
        """Paths that every route between the two homes must touch.

        Same piece: the piece boundary.  Otherwise the separator of the lowest
        common step plus the boundary of the piece that step split.
        """
        if a == b and a[0] == "piece":
            return self.pieces[a[1]].boundary
        s = self.lca_step(a, b)
        if s < 0:
            return ()
        st = self.steps[s]
        return tuple(sorted(set(st.paths) | set(st.boundary)))

    def path_is_ancestor(self, qa: int, qb: int) -> bool:
        """True when qa was created at qb's step or above it."""
        return self.paths[qa].step in self.step_chain(self.paths[qb].step)

    def piece_count_constant(self) -> float:
        n = self.g.n
        if n < 2:
            return 0.0
        return len(self.pieces) / (n * self.eps / math.log2(n))

    def dump(self) -> str:
        lines = []
        for p in self.pieces:
            lines.append(
                f"piece {p.piece_id} nodes {' '.join(map(str, p.node_set))} "
                f"boundary {' '.join(map(str, p.boundary))}"
            )
        for q in self.paths:
            lines.append(f"path {q.path_id} nodes {' '.join(map(str, q.nodes))}")
        return "\n".join(lines) + "\n"


def size_cap_for(n: int, eps: float) -> int:
    return max(1, math.ceil(eps**-2 * math.log2(max(n, 2))))


def _separate(
    g: PlanarGraph,
    spt: ShortestPathTree,
    nodes: Sequence[int],
    removed: list[bool],
    weight_of: dict[int, float],
) -> tuple[int, ...]:
    """Apply the three-path separator to one piece; returns global node ids.

    Everything outside the piece is connected (it holds the tree root and
    all earlier root-paths) and is contracted to one super-root.
    """
    local = {x: i for i, x in enumerate(nodes)}
    k = len(nodes)
    h = contract_outside(g, nodes, local)
    has_root = h.n > k
    parent = [-1] * h.n
    for x in nodes:
        p = spt.parent[x]
        if p >= 0:
            parent[local[x]] = local[p] if p in local else k
    if h.n <= 3:
        return tuple(nodes)
    h = triangulate(h)
    w = [weight_of.get(x, 0.0) for x in nodes] + ([0.0] if has_root else [])
    if not any(w):
        w = [1.0] * k + ([0.0] if has_root else [])
    picked = fundamental_cycle_separator(h, parent, w)
    return tuple(nodes[i] for i in picked if i < k)


def contract_outside(g: PlanarGraph, nodes: Sequence[int], local: dict[int, int]) -> PlanarGraph:
    """Embedded graph of the piece with every outside node merged into node k.

    The outside is connected, so walking around it once (turning only at
    outside nodes) meets every piece-to-outside edge in the cyclic order the
    merged node sees them.  Parallel edges to the merged node are dropped,
    keeping the first one met, which keeps the embedding planar.
    """
    k = len(nodes)
    rot, idx = g.rotation, g.rotation_index
    start = next(((x, y) for x in nodes for y in rot[x] if y not in local), None)
    if start is None:
        sub, _ = g.subgraph(nodes)
        return sub
    crossing = sum(1 for x in nodes for y in rot[x] if y not in local)
    ring = []
    a, b = start
    while True:
        ring.append((a, b))
        u, w = a, b
        while True:
            c = rot[w][(idx[w][u] + 1) % len(rot[w])]
            if c in local:
                break
            u, w = w, c
        a, b = c, w
        if (a, b) == start or len(ring) > crossing:
            break
    if len(ring) != crossing:
        # outside not connected after all: let the planarity tester sort it out
        edges = {(local[x], local[y]) for x in nodes for y, _ in g.adj[x] if y in local and x < y}
        edges |= {(local[x], k) for x, _ in ring}
        edges |= {(local[x], k) for x in nodes for y in rot[x] if y not in local}
        return embed(PlanarGraph(k + 1, tuple((p, q, 1) for p, q in sorted(edges))))
    kept = {}
    for x, y in ring:
        kept.setdefault(x, y)
    rk = tuple(local[x] for x, y in ring if kept[x] == y)
    rows = []
    edges = []
    for x in nodes:
        i = local[x]
        row = []
        for y in rot[x]:
            j = local.get(y)
            if j is None:
                if kept[x] == y:
                    row.append(k)
                    edges.append((i, k, 1))
            else:
                row.append(j)
                if i < j:
                    edges.append((i, j, 1))
        rows.append(tuple(row))
    rows.append(rk)
    return PlanarGraph.trusted(k + 1, tuple(sorted(edges)), tuple(rows))


def build_division(
    g: PlanarGraph,
    eps: float,
    boundary_cap: int = 10,
    size_cap: int | None = None,
    root: int = 0,
) -> Division:
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    n = g.n
    if size_cap is None:
        size_cap = size_cap_for(n, eps)
    spt = sssp(g, root)
    removed = [False] * n
    node_to_path = [-1] * n
    paths: list[SeparatorPath] = []
    steps: list[Step] = []
    pieces: list[Piece] = []
    max_boundary = 0

    work = deque([(tuple(range(n)), (), -1, 0)])
    while work:
        nodes, boundary, parent_step, depth = work.popleft()
        max_boundary = max(max_boundary, len(boundary))
        too_many = len(boundary) > boundary_cap
        if not too_many and len(nodes) <= size_cap:
            pieces.append(Piece(len(pieces), nodes, boundary, parent_step))
            continue
        node_set = set(nodes)
        if too_many:
            weight_of: dict[int, float] = {}
            for qid in boundary:
                rep = min(
                    (y for x in paths[qid].private for y, _ in g.adj[x] if y in node_set),
                    default=None,
                )
                if rep is not None:
                    weight_of[rep] = weight_of.get(rep, 0.0) + 1.0
        else:
            weight_of = dict.fromkeys(nodes, 1.0)
        total = sum(weight_of.values()) or float(len(nodes))
        picked = _separate(g, spt, nodes, removed, weight_of)

        sid = len(steps)
        new_paths = []
        for x in picked:
            if removed[x]:
                continue
            chain = spt.path_to_root(x)[::-1]
            private = tuple(y for y in chain if not removed[y] and y in node_set)
            qid = len(paths)
            for y in private:
                removed[y] = True
                node_to_path[y] = qid
            length = spt.dist[x] - spt.dist[chain[0]]
            paths.append(SeparatorPath(qid, tuple(chain), length, depth, sid, private))
            new_paths.append(qid)

        comps = _components([x for x in nodes if not removed[x]], g, removed)
        use_w = weight_of if any(weight_of.values()) else dict.fromkeys(nodes, 1.0)
        heaviest = max((sum(use_w.get(x, 0.0) for x in c) for c in comps), default=0.0)
        steps.append(
            Step(sid, parent_step, depth, tuple(new_paths), tuple(boundary), len(nodes),
                 heaviest / total if total else 0.0, too_many)
        )
        candidates = list(boundary) + new_paths
        for comp in comps:
            cset = set(comp)
            bnd = tuple(
                sorted(
                    q
                    for q in candidates
                    if any(y in cset for x in paths[q].private for y, _ in g.adj[x])
                )
            )
            work.append((tuple(comp), bnd, sid, depth + 1))

    node_to_piece = [-1] * n
    for p in pieces:
        for x in p.node_set:
            node_to_piece[x] = p.piece_id
    return Division(
        g, eps, boundary_cap, size_cap, spt, paths, steps, pieces, node_to_piece,
        node_to_path, max_boundary,
    )


def _components(nodes: list[int], g: PlanarGraph, removed: list[bool]) -> list[list[int]]:
    todo = set(nodes)
    out = []
    for s in nodes:
        if s not in todo:
            continue
        todo.discard(s)
        comp = [s]
        stack = [s]
        while stack:
            x = stack.pop()
            for y, _ in g.adj[x]:
                if y in todo:
                    todo.discard(y)
                    comp.append(y)
                    stack.append(y)
        out.append(sorted(comp))
    return out


def separating_triple(div: Division, qa: int, qb: int) -> tuple[SeparatorPath, ...]:
    """Separator paths at the lowest common step of two paths' steps."""
    ca = div.step_chain(div.paths[qa].step)
    cb = set(div.step_chain(div.paths[qb].step))
    for s in ca:
        if s in cb:
            return tuple(div.paths[q] for q in div.steps[s].paths)
    return ()


def separating_step_for_pieces(div: Division, pa: int, pb: int) -> int:
    return div.lca_step(("piece", pa), ("piece", pb))
