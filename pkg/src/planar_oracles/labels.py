"""(1+eps)-approximate distance labels built from recursive shortest-path separators.

At every recursion level each node keeps, for each of the (at most three)
separator paths of its current component, a small set of portals on the
path with exact distances.  Portals are picked greedily outwards from the
owner's closest path node so that every path node t is reachable through
some portal c with d(u, c) + d_Q(c, t) <= (1 + eps) d(u, t).  Two labels decode
by meeting on a common path.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import dijkstra as csgraph_dijkstra

from .graph import PlanarGraph, embed, sssp, triangulate
from .separators import fundamental_cycle_separator

_HEAD = struct.Struct("<q d 16s I")
_REC = struct.Struct("<I I I q q")


class LabelMismatch(ValueError):
    pass


@dataclass
class DistanceLabel:
    owner: int
    eps: float
    build_id: bytes
    entries: list[tuple[int, int, int, int, int]] = field(default_factory=list)
    _by_path: dict | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.entries)

    def by_path(self) -> dict[int, list[tuple[int, int]]]:
        if self._by_path is None:
            grouped: dict[int, list[tuple[int, int]]] = {}
            for _, pid, _, off, d in self.entries:
                grouped.setdefault(pid, []).append((off, d))
            for rows in grouped.values():
                rows.sort()
            self._by_path = grouped
        return self._by_path

    def to_bytes(self) -> bytes:
        body = _HEAD.pack(self.owner, self.eps, self.build_id, len(self.entries))
        body += b"".join(_REC.pack(*e) for e in self.entries)
        return struct.pack("<I", len(body)) + body

    @classmethod
    def from_bytes(cls, blob: bytes) -> "DistanceLabel":
        (size,) = struct.unpack_from("<I", blob)
        if size + 4 != len(blob):
            raise ValueError("truncated label record")
        owner, eps, bid, count = _HEAD.unpack_from(blob, 4)
        pos = 4 + _HEAD.size
        entries = [_REC.unpack_from(blob, pos + i * _REC.size) for i in range(count)]
        return cls(owner, eps, bid, [tuple(e) for e in entries])


@dataclass
class LabelSet:
    eps: float
    build_id: bytes
    labels: dict[int, DistanceLabel]
    depth: int

    def __getitem__(self, u: int) -> DistanceLabel:
        return self.labels[u]

    def max_entries(self) -> int:
        return max((len(lb) for lb in self.labels.values()), default=0)

    def words(self) -> int:
        return sum(5 * len(lb) + 2 for lb in self.labels.values())

    def distance(self, u: int, v: int) -> float:
        return decode(self.labels[u], self.labels[v])


def _build_id(g: PlanarGraph, eps: float) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    h.update(repr((g.n, g.edges, eps)).encode())
    return h.digest()


def build_labels(g: PlanarGraph, eps: float, owners=None) -> LabelSet:
    """Labels for ``owners`` (default: every node)."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if g.rotation is None:
        g = embed(g)
    bid = _build_id(g, eps)
    owner_set = set(range(g.n)) if owners is None else set(owners)
    labels = {u: DistanceLabel(u, eps, bid) for u in sorted(owner_set)}
    next_path = 0
    max_level = 0
    stack = [(tuple(range(g.n)), 0)]
    while stack:
        nodes, level = stack.pop()
        if not owner_set.intersection(nodes) or len(nodes) < 2:
            continue
        max_level = max(max_level, level + 1)
        sub, order = g.subgraph(nodes)
        k = sub.n
        spt = sssp(sub, 0)
        if k <= 3:
            picked = tuple(range(k))
        else:
            picked = fundamental_cycle_separator(triangulate(sub), spt.parent, [1.0] * k)
        own_local = np.array([i for i, x in enumerate(order) if x in owner_set], dtype=np.int64)
        on_sep = set()
        for x in picked:
            path = spt.path_to_root(x)[::-1]
            on_sep.update(path)
            pid = next_path
            next_path += 1
            _attach(labels, sub, order, path, spt.dist, own_local, eps, level, pid)
        rest = [i for i in range(k) if i not in on_sep]
        if rest:
            rest_g, rest_order = sub.subgraph(rest)
            for comp in rest_g.components():
                stack.append((tuple(order[rest_order[i]] for i in comp), level + 1))
    return LabelSet(eps, bid, labels, max_level)


def _attach(labels, sub, order, path, dist, own_local, eps, level, pid) -> None:
    if len(own_local) == 0:
        return
    path_arr = np.array(path, dtype=np.int64)
    if len(own_local) <= len(path):
        d = csgraph_dijkstra(sub.csr, directed=False, indices=own_local)[:, path_arr].T
    else:
        d = csgraph_dijkstra(sub.csr, directed=False, indices=path_arr)[:, own_local]
    off = np.array([dist[x] for x in path], dtype=np.float64)
    # anchor at the closest path node, then sweep away from it on both sides;
    # each new portal lowers d(u, t) -/+ offset by more than eps * d(u, anchor)
    cols = np.arange(d.shape[1])
    anchor = d.argmin(axis=0)
    chosen = np.zeros(d.shape, dtype=bool)
    chosen[anchor, cols] = True
    near = d[anchor, cols]
    up = near - off[anchor]  # min over portals at or before t of d(u, c) - off(c)
    down = near + off[anchor]  # min over portals at or after t of d(u, c) + off(c)
    for t in range(len(path)):
        row = d[t]
        need = (t > anchor) & (up + off[t] > (1.0 + eps) * row)
        chosen[t] |= need
        up = np.where(need, np.minimum(up, row - off[t]), up)
    for t in range(len(path) - 1, -1, -1):
        row = d[t]
        need = (t < anchor) & (down - off[t] > (1.0 + eps) * row)
        chosen[t] |= need
        down = np.where(need, np.minimum(down, row + off[t]), down)
    ts, us = np.nonzero(chosen)
    for t, ui in zip(ts.tolist(), us.tolist()):
        owner = order[int(own_local[ui])]
        labels[owner].entries.append(
            (level, pid, order[path[t]], int(off[t]), int(d[t, ui]))
        )


def decode(a: DistanceLabel, b: DistanceLabel) -> float:
    if a.build_id != b.build_id:
        raise LabelMismatch("labels come from different builds")
    if a.owner == b.owner:
        return 0
    pa, pb = a.by_path(), b.by_path()
    if len(pa) > len(pb):
        pa, pb = pb, pa
    best = math.inf
    for pid, rows_a in pa.items():
        rows_b = pb.get(pid)
        if rows_b is None:
            continue
        best = min(best, _meet(rows_a, rows_b))
    return best


def _meet(ra: list[tuple[int, int]], rb: list[tuple[int, int]]) -> float:
    """min over pairs of da + db + |oa - ob|, both lists sorted by offset."""
    best = math.inf
    min_a = min_b = math.inf  # min of (dist - offset) seen so far on each side
    i = j = 0
    while i < len(ra) or j < len(rb):
        if j >= len(rb) or (i < len(ra) and ra[i][0] <= rb[j][0]):
            o, d = ra[i]
            i += 1
            best = min(best, min_b + o + d)
            min_a = min(min_a, d - o)
        else:
            o, d = rb[j]
            j += 1
            best = min(best, min_a + o + d)
            min_b = min(min_b, d - o)
    return best
