"""Workload runner: build an oracle, query sampled pairs, check every estimate.

The main JSON report is a pure function of the config (byte-identical across
runs).  Wall-clock measurements go to a companion ``*.timing.json`` file.
"""

from __future__ import annotations

import csv
import json
import math
import multiprocessing as mp
import os
import random
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import dijkstra as csgraph_dijkstra

from .generators import parse_spec
from .graph import GraphError, PlanarGraph, embed
from .io import load_graph
from .oracles import ORACLES, build_oracle

SCHEMA = "planar-oracles/report"
SCHEMA_VERSION = 1
ALL_PAIRS_LIMIT = 3000
WARMUP = 100
THREADS_ENV = "PLANAR_ORACLES_THREADS"
BUCKETS = (1.0, 1.0001, 1.01, 1.05, 1.1, 1.25, 1.5, 2.0, 4.0, 8.0, 16.0, 32.0, 96.0)
TOL = 1e-9


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    input: str | None = None
    gen: str | None = None
    oracle: str = "eps-moderate"
    eps: float = 0.5
    theta: float = 1.0
    seed: int = 0
    pairs: int | str = 1000
    report: str | None = None
    sidecar: str | None = None

    def validate(self) -> None:
        if (self.input is None) == (self.gen is None):
            raise ConfigError("give exactly one of --input or --gen")
        if self.oracle not in ORACLES:
            raise ConfigError(f"unknown oracle {self.oracle!r}; choose from {', '.join(ORACLES)}")
        if not self.eps > 0:
            raise ConfigError("--eps must be positive")
        if self.pairs != "all" and (not isinstance(self.pairs, int) or self.pairs < 0):
            raise ConfigError("--pairs takes a non-negative count or 'all'")

    def label(self) -> str:
        return f"{self.gen or Path(self.input).name}/{self.oracle}/eps={self.eps}"


@dataclass
class Report:
    body: dict
    timing: dict = field(default_factory=dict)

    @property
    def violations(self) -> int:
        return self.body["violations"]["total"]

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_json(self) -> str:
        return json.dumps(self.body, indent=2, sort_keys=True, default=_plain) + "\n"

    def write(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        path.with_suffix(".timing.json").write_text(
            json.dumps(self.timing, indent=2, sort_keys=True) + "\n"
        )
        with open(path.with_suffix(".csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["stretch_lo", "stretch_hi", "count"])
            for row in self.body["stretch"]["histogram"]:
                w.writerow([row["lo"], row["hi"], row["count"]])


def _plain(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, (set, frozenset, tuple)):
        return sorted(x) if isinstance(x, (set, frozenset)) else list(x)
    raise TypeError(f"not serializable: {type(x).__name__}")


def load(cfg: RunConfig) -> PlanarGraph:
    g = parse_spec(cfg.gen) if cfg.gen else load_graph(cfg.input, cfg.sidecar)
    if g.rotation is None:
        g = embed(g)
    if g.n == 0:
        raise GraphError("graph has no nodes")
    if not g.is_connected():
        raise GraphError("graph must be connected; split it into components first")
    return g


def sample_pairs(n: int, pairs: int | str, seed: int) -> list[tuple[int, int]]:
    """Deterministic pair list, grouped by source so per-source caches stay warm."""
    if pairs == "all":
        if n > ALL_PAIRS_LIMIT:
            raise ConfigError(f"pairs=all needs n <= {ALL_PAIRS_LIMIT} (got n={n}); pass a count")
        return [(u, v) for u in range(n) for v in range(u + 1, n)]
    rng = random.Random(seed)
    out = []
    for _ in range(pairs):
        u = rng.randrange(n)
        v = rng.randrange(n - 1) if n > 1 else 0
        if n > 1 and v >= u:
            v += 1
        out.append((u, v))
    out.sort()
    return out


def exact_table(g: PlanarGraph, pairs, chunk: int = 256) -> np.ndarray:
    out = np.empty(len(pairs))
    by_src: dict[int, list[int]] = {}
    for k, (u, _) in enumerate(pairs):
        by_src.setdefault(u, []).append(k)
    sources = sorted(by_src)
    for start in range(0, len(sources), chunk):
        block = sources[start : start + chunk]
        d = csgraph_dijkstra(g.csr, directed=False, indices=block)
        for s, r in zip(block, d):
            ks = by_src[s]
            out[ks] = r[[pairs[k][1] for k in ks]]
    return out


def stretch_bound(kind: str, handle, eps: float):
    """(multiplicative bound, additive bound) promised by each oracle."""
    if kind == "exact":
        return 1.0, 0.0
    if kind == "const":
        return max(1 + 6 * handle.eps, 4 * handle.rho), 0.0
    if kind in ("eps-moderate", "eps-poly"):
        return 1 + eps, 0.0
    return math.inf, handle.additive_bound


_WORKER_HANDLE = None


def _worker(chunk):
    out, times = [], []
    for u, v in chunk:
        t = time.perf_counter_ns()
        out.append(_WORKER_HANDLE.distance(u, v))
        times.append(time.perf_counter_ns() - t)
    return out, times


def run_queries(handle, pairs, threads: int = 1):
    global _WORKER_HANDLE
    if threads <= 1 or len(pairs) < 2 * threads:
        _WORKER_HANDLE = handle
        return _worker(pairs)
    _WORKER_HANDLE = handle
    size = math.ceil(len(pairs) / threads)
    chunks = [pairs[i : i + size] for i in range(0, len(pairs), size)]
    with mp.get_context("fork").Pool(threads) as pool:
        parts = pool.map(_worker, chunks)
    est = [x for p in parts for x in p[0]]
    times = [x for p in parts for x in p[1]]
    return est, times


def _histogram(ratios: np.ndarray) -> list[dict]:
    edges = list(BUCKETS) + [math.inf]
    rows = []
    for lo, hi in zip(edges, edges[1:]):
        c = int(((ratios >= lo) & (ratios < hi)).sum())
        rows.append({"lo": lo, "hi": hi if math.isfinite(hi) else "inf", "count": c})
    return rows


def _percentiles(ns: list[int]) -> dict:
    if not ns:
        return {}
    a = np.asarray(ns) / 1000.0
    return {f"p{q}": round(float(np.percentile(a, q)), 3) for q in (50, 90, 99)} | {
        "max": round(float(a.max()), 3),
        "count": int(a.size),
    }


def run(cfg: RunConfig) -> Report:
    cfg.validate()
    g = load(cfg)
    pairs = sample_pairs(g.n, cfg.pairs, cfg.seed)
    t0 = time.perf_counter()
    handle = build_oracle(cfg.oracle, g, cfg.eps, cfg.theta)
    build_s = time.perf_counter() - t0
    threads = max(1, int(os.environ.get(THREADS_ENV, "1") or 1))
    est, times = run_queries(handle, pairs, threads)
    exact = exact_table(g, pairs) if pairs else np.empty(0)
    est_a = np.asarray(est, dtype=float)
    mult, add = stretch_bound(cfg.oracle, handle, cfg.eps)
    lower = int((est_a < exact - TOL).sum())
    pos = exact > 0
    ratios = np.where(pos, est_a / np.where(pos, exact, 1), 1.0)
    if math.isfinite(mult):
        over = int((est_a > mult * exact + TOL).sum())
    else:
        over = int((est_a - exact > add + TOL).sum())
    stats = handle.stats()
    body = {
        "schema": SCHEMA,
        "schema_version": SCHEMA_VERSION,
        "config": {k: v for k, v in asdict(cfg).items() if k not in ("report",)},
        "graph": {"n": g.n, "m": g.m, "total_weight": g.total_weight, "max_weight": g.max_weight},
        "oracle": stats,
        "space_words": _words(stats),
        "queries": len(pairs),
        "stretch": {
            "max": float(ratios.max()) if len(ratios) else 1.0,
            "mean": float(ratios.mean()) if len(ratios) else 1.0,
            "p99": float(np.percentile(ratios, 99)) if len(ratios) else 1.0,
            "bound": mult if math.isfinite(mult) else None,
            "histogram": _histogram(ratios),
        },
        "violations": {
            "lower_bound": lower,
            "stretch_bound": over,
            "total": lower + over,
        },
    }
    if cfg.oracle == "additive":
        diff = est_a - exact
        body["additive"] = {
            "max_error": float(diff.max()) if len(diff) else 0.0,
            "bound": add,
        }
    timing = {
        "build_seconds": round(build_s, 6),
        "query_us": _percentiles(times[WARMUP:]),
        "warmup_excluded": min(WARMUP, len(times)),
        "threads": threads,
    }
    rep = Report(body, timing)
    if cfg.report:
        rep.write(cfg.report)
    return rep


def _words(stats: dict) -> dict:
    w = stats.get("words")
    if isinstance(w, dict):
        return dict(w, total=sum(w.values()))
    return {"total": int(w or 0)}


def sweep(configs: list[RunConfig], report: str | None = None) -> dict:
    """Run every config; aggregate space and query time per oracle and eps."""
    runs, failures = [], []
    for cfg in configs:
        try:
            rep = run(cfg)
        except (ConfigError, GraphError, ValueError) as exc:
            failures.append({"config": cfg.label(), "error": str(exc)})
            continue
        if not rep.ok:
            failures.append({"config": cfg.label(), "error": f"{rep.violations} violations"})
        runs.append((cfg, rep))
    rows = []
    for cfg, rep in runs:
        b = rep.body
        q = rep.timing["query_us"].get("p50", 0.0)
        rows.append(
            {
                "run": cfg.label(),
                "oracle": cfg.oracle,
                "eps": cfg.eps,
                "n": b["graph"]["n"],
                "space_words": b["space_words"]["total"],
                "max_label_entries": b["oracle"].get("max_label_entries", 0),
                "query_p50_us": q,
                "space_x_query": round(b["space_words"]["total"] * q, 3),
                "max_stretch": b["stretch"]["max"],
                "violations": b["violations"]["total"],
            }
        )
    out = {"schema": SCHEMA + "/sweep", "schema_version": SCHEMA_VERSION, "runs": rows, "failures": failures}
    if report:
        path = Path(report)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
        with open(path.with_suffix(".csv"), "w", newline="") as fh:
            cols = list(rows[0]) if rows else ["run"]
            w = csv.DictWriter(fh, fieldnames=cols)
            w.writeheader()
            w.writerows(rows)
    return out
