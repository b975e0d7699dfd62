"""DIMACS ``.gr`` reading/writing and the embedding sidecar format."""

from __future__ import annotations

import io
from pathlib import Path
from typing import BinaryIO, TextIO

from .graph import GraphError, PlanarGraph, embed


class ParseError(GraphError):
    def __init__(self, line_no: int, msg: str) -> None:
        super().__init__(f"line {line_no}: {msg}")
        self.line_no = line_no


def parse_dimacs(data: bytes | str | BinaryIO | TextIO) -> PlanarGraph:
    """Read a 9th DIMACS challenge shortest-path file.

    Arc pairs are merged into undirected edges. Node ids in the file are
    1-based; the returned graph uses 0-based ids and carries no embedding.
    """
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        data = data.decode("ascii")
    n = None
    declared_arcs = 0
    weights: dict[tuple[int, int], int] = {}
    for no, raw in enumerate(io.StringIO(data), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise ParseError(no, "duplicate problem line")
            if len(parts) != 4 or parts[1] != "sp":
                raise ParseError(no, "expected 'p sp <n> <m>'")
            try:
                n, declared_arcs = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(no, "non-integer size in problem line") from None
            if n < 1:
                raise ParseError(no, "node count must be positive")
        elif parts[0] == "a":
            if n is None:
                raise ParseError(no, "arc before problem line")
            if len(parts) != 4:
                raise ParseError(no, "expected 'a <u> <v> <w>'")
            try:
                u, v, w = (int(x) for x in parts[1:])
            except ValueError:
                raise ParseError(no, "non-integer arc field") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphError(f"line {no}: node id out of range 1..{n}")
            if u == v:
                raise GraphError(f"line {no}: self-loop at node {u}")
            if w < 1:
                raise GraphError(f"line {no}: weight {w} below 1")
            key = (min(u, v) - 1, max(u, v) - 1)
            old = weights.get(key)
            if old is not None and old != w:
                raise GraphError(f"line {no}: conflicting duplicate arc {u} {v} ({old} vs {w})")
            weights[key] = w
        else:
            raise ParseError(no, f"unknown line type {parts[0]!r}")
    if n is None:
        raise ParseError(0, "missing problem line")
    del declared_arcs  # arcs may be listed once or as pairs; the count is informational
    return PlanarGraph(n, tuple((u, v, w) for (u, v), w in weights.items()))


def serialize_dimacs(g: PlanarGraph) -> str:
    lines = [f"p sp {g.n} {2 * g.m}"]
    for u, v, w in g.edges:
        lines.append(f"a {u + 1} {v + 1} {w}")
        lines.append(f"a {v + 1} {u + 1} {w}")
    return "\n".join(lines) + "\n"


def read_embedding(g: PlanarGraph, text: str) -> PlanarGraph:
    """Attach a sidecar rotation system: line i lists node i's neighbours in cyclic order."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("c")]
    if len(rows) != g.n:
        raise GraphError(f"embedding has {len(rows)} rows for {g.n} nodes")
    rot = tuple(tuple(int(x) for x in row) for row in rows)
    for v, r in enumerate(rot):
        if sorted(r) != [y for y, _ in g.adj[v]]:
            raise GraphError(f"embedding row {v} does not list exactly the neighbours of {v}")
    out = PlanarGraph(g.n, g.edges, rot)
    if not out.euler_ok():
        raise GraphError("sidecar rotation system is not planar (Euler check failed)")
    return out


def write_embedding(g: PlanarGraph) -> str:
    if g.rotation is None:
        raise GraphError("graph has no embedding")
    return "".join(" ".join(map(str, r)) + "\n" for r in g.rotation)


def load_graph(path: str | Path, sidecar: str | Path | None = None) -> PlanarGraph:
    g = parse_dimacs(Path(path).read_bytes())
    if sidecar is not None:
        return read_embedding(g, Path(sidecar).read_text())
    return embed(g)
