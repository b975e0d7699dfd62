"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Reference distances come from scipy's Dijkstra (all pairs for the family,
per-source rows for the sampled large instances).  Oracles are built once
in a module fixture and shared by the criteria that read them.
"""

from __future__ import annotations

import math
import random
import time

import numpy as np
import pytest
from scipy.sparse.csgraph import dijkstra

from planar_oracles.additive import AdditiveOracle, build_additive
from planar_oracles.bench import RunConfig, run, sample_pairs
from planar_oracles.covers import build_cover_hierarchy, dominating_set
from planar_oracles.generators import parse_spec, random_weighted_grid
from planar_oracles.labels import build_labels
from planar_oracles.oracles import build_oracle, landmark_radius
from planar_oracles.separators import build_division, size_cap_for

EPS = (0.5, 0.25, 0.1)
BUDGET_S = 600
SAMPLED = 2000

FAMILY = [
    "grid:6x6", "grid:8x8", "grid:10x10", "grid:12x12", "grid:5x20", "grid:14x14",
    "grid:16x16", "grid:3x40", "grid:2x50", "grid:4x30", "grid:17x17",
    "wgrid:6x6:4:1", "wgrid:8x8:8:2", "wgrid:10x10:3:3", "wgrid:12x12:6:4",
    "wgrid:14x14:2:5", "wgrid:9x16:4:8", "wgrid:16x16:5:7", "wgrid:3x30:7:9",
    "dgrid:7x7:0.2:1", "dgrid:9x9:0.15:2", "dgrid:11x11:0.25:3", "dgrid:13x13:0.2:4",
    "dgrid:15x15:0.1:5", "dgrid:10x20:0.2:8", "dgrid:17x17:0.15:6", "dgrid:6x30:0.1:7",
    "wgrid:13x15:8:10", "dgrid:16x18:0.2:11", "grid:15x18",
]
LARGE = ["wgrid:44x45:6:9", "grid:141x141"]


def log_star(n: float) -> int:
    k = 0
    while n > 1:
        n = math.log2(n)
        k += 1
    return k


def say(capsys, number: int, ok: bool, text: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")


def _kinds():
    return [("const", 0.5), ("additive", 0.5)] + [("eps-moderate", e) for e in EPS]


def _check(handle, pairs, exact):
    est = np.array([handle.distance(u, v) for u, v in pairs], dtype=float)
    pos = exact > 0
    ratio = np.where(pos, est / np.where(pos, exact, 1), 1.0)
    return {
        "lower": int((est < exact).sum()),
        "max_ratio": float(ratio.max()),
        "over_eps": None,
        "max_err": float((est - exact).max()),
    }


def _depth(handle) -> int:
    s = handle.stats()
    return s.get("additive_depth", s.get("depth", 0))


@pytest.fixture(scope="module")
def results():
    """Build every oracle on every instance and verify against exact distances."""
    t0 = time.perf_counter()
    rows = []
    for spec in FAMILY + LARGE:
        g = parse_spec(spec)
        if spec in LARGE:
            pairs = sample_pairs(g.n, SAMPLED, 0)
            src = sorted({u for u, _ in pairs})
            d = dijkstra(g.csr, directed=False, indices=src)
            row_of = {s: i for i, s in enumerate(src)}
            exact = np.array([d[row_of[u], v] for u, v in pairs])
            del d
        else:
            D = dijkstra(g.csr, directed=False)
            pairs = [(u, v) for u in range(g.n) for v in range(u + 1, g.n)]
            exact = D[np.triu_indices(g.n, 1)]
        for kind, eps in _kinds():
            h = build_oracle(kind, g, eps, 1.0)
            r = _check(h, pairs, exact)
            r.update(spec=spec, n=g.n, kind=kind, eps=eps, depth=_depth(h), sampled=spec in LARGE)
            if kind == "const":
                r["rho"] = h.rho
                r["bound"] = max(1 + 6 * h.eps, 4 * h.rho)
            if kind == "additive":
                r["bound"] = h.additive_bound
            rows.append(r)
            del h
    return rows, time.perf_counter() - t0


def test_c01_lower_bound(results, capsys):
    rows, elapsed = results
    bad = sum(r["lower"] for r in rows)
    specs = {r["spec"] for r in rows}
    full = {r["spec"] for r in rows if not r["sampled"]}
    ok = bad == 0 and len(full) >= 30 and elapsed < BUDGET_S and max(r["n"] for r in rows) <= 20000
    say(capsys, 1, ok, f"{len(specs)} instances ({len(full)} all-pairs), {len(rows)} oracle runs, "
        f"lower-bound violations={bad}, largest n={max(r['n'] for r in rows)}, {elapsed:.0f}s")
    assert bad == 0
    assert len(full) >= 30
    assert elapsed < BUDGET_S


def test_c02_eps_stretch(results, capsys):
    rows, _ = results
    worst = {}
    bad = []
    for r in rows:
        if r["kind"] == "eps-moderate":
            worst[r["eps"]] = max(worst.get(r["eps"], 1.0), r["max_ratio"])
            if r["max_ratio"] > 1 + r["eps"]:
                bad.append((r["spec"], r["eps"], r["max_ratio"]))
    say(capsys, 2, not bad, "max stretch " + ", ".join(f"eps={e}: {worst[e]:.4f}" for e in EPS)
        + f"; violations={len(bad)}")
    assert not bad


POLY = ["pgrid:8x8:0", "pgrid:10x10:3", "pgrid:12x12:7", "pgrid:6x20:4"]


def test_c03_polynomial_weights(capsys):
    graphs = [(s, parse_spec(s)) for s in POLY]
    for r, c, seed in [(9, 9, 1), (11, 12, 2)]:
        n = r * c
        graphs.append((f"wgrid:{r}x{c}:{n * n}:{seed}", random_weighted_grid(r, c, n * n, seed)))
    worst, bad = {}, []
    for spec, g in graphs:
        assert g.max_weight <= g.n ** 2
        D = dijkstra(g.csr, directed=False)
        iu = np.triu_indices(g.n, 1)
        exact = D[iu]
        pairs = list(zip(*iu))
        for eps in EPS:
            h = build_oracle("eps-poly", g, eps)
            r = _check(h, pairs, exact)
            worst[eps] = max(worst.get(eps, 1.0), r["max_ratio"])
            if r["lower"] or r["max_ratio"] > 1 + eps:
                bad.append((spec, eps, r))
    say(capsys, 3, not bad, f"{len(graphs)} instances with weights up to n^2; max stretch "
        + ", ".join(f"eps={e}: {worst[e]:.4f}" for e in EPS))
    assert not bad


def test_c04_additive(results, capsys):
    rows, _ = results
    bad = [r for r in rows if r["kind"] == "additive" and r["max_err"] > r["bound"]]
    n_runs = sum(r["kind"] == "additive" for r in rows)
    # extra runs with Delta below the diameter (C = 3)
    extra = 0
    for spec in ["grid:12x12", "wgrid:14x14:2:5", "dgrid:13x13:0.2:4", "grid:3x40"]:
        g = parse_spec(spec)
        D = dijkstra(g.csr, directed=False)
        delta = math.ceil(D.max() / 3)
        for eps in (0.5, 0.25):
            o = build_additive(g, delta, 3, eps, validate="exact")
            iu = np.triu_indices(g.n, 1)
            est = np.array([o.query(int(u), int(v)) for u, v in zip(*iu)])
            err = est - D[iu]
            extra += 1
            if err.max() > 6 * eps * delta or (err < 0).any():
                bad.append({"spec": spec, "eps": eps, "max_err": float(err.max())})
    worst = max((r["max_err"] / r["bound"] for r in rows if r["kind"] == "additive" and r["bound"]), default=0)
    say(capsys, 4, not bad, f"{n_runs + extra} diameter-validated runs; worst error/bound={worst:.3f}; "
        f"violations={len(bad)}")
    assert not bad


def test_c05_const(results, capsys):
    rows, _ = results
    const = [r for r in rows if r["kind"] == "const"]
    rho = max(r["rho"] for r in const)
    worst = max(r["max_ratio"] for r in const)
    bad = [r for r in const if r["max_ratio"] > r["bound"] or (r["rho"] <= 24 and r["max_ratio"] > 96)]
    say(capsys, 5, not bad, f"max stretch {worst:.3f}, achieved rho={rho:.3f}, "
        f"bound max(1+6eps, 4rho)={max(r['bound'] for r in const):.3f}")
    assert not bad
    assert rho <= 24


def test_c06_dominating_set(capsys):
    checked, bad = 0, []
    for spec in FAMILY + [LARGE[1].replace("141x141", "40x45")]:
        g = parse_spec(spec)
        if g.max_weight != 1:
            continue
        D = dijkstra(g.csr, directed=False)
        for delta in sorted({1, 2, 5, landmark_radius(g.n, 0.5, 0)}):
            if delta >= g.n:
                continue
            ds = dominating_set(g, delta)
            L = list(ds.landmarks)
            if len(L) > g.n / (delta + 1) or not (D[:, L].min(axis=1) <= delta).all():
                bad.append((spec, delta))
            checked += 1
    say(capsys, 6, not bad, f"{checked} unit-weight (instance, delta) runs; size and ball checks; "
        f"violations={len(bad)}")
    assert not bad


def _audit_level(g, lv, D):
    """Coverage, membership count and center-tree depth, all recomputed."""
    sets = [np.zeros(g.n, dtype=bool) for _ in lv.clusters]
    for m, cl in zip(sets, lv.clusters):
        m[list(cl.nodes)] = True
    member = np.zeros(g.n, dtype=int)
    for m in sets:
        member += m
    covered = True
    for x in range(g.n):
        ball = D[x] <= lv.radius
        if not any((ball <= m).all() for m in (sets[c] for c in lv.membership[x])):
            covered = False
            break
    depth = 0
    for cl in lv.clusters:
        sub, order = g.subgraph(cl.nodes)
        d = dijkstra(sub.csr, directed=False, indices=order.index(cl.center))
        depth = max(depth, int(d.max()))
    return covered, int(member.max()), depth


def test_c07_covers(capsys):
    bad, levels, rho_max = [], 0, 0.0
    for spec in FAMILY + [LARGE[0]]:
        g = parse_spec(spec)
        D = dijkstra(g.csr, directed=False)
        h = build_cover_hierarchy(g, 0.5, landmark_radius(g.n, 0.5, 1.0))
        rho_max = max(rho_max, h.rho)
        for lv in h.levels.values():
            covered, member, depth = _audit_level(g, lv, D)
            levels += 1
            if not covered or member > h.degree_bound or depth > h.rho * lv.radius:
                bad.append((spec, lv.level, covered, member, depth))
    say(capsys, 7, not bad, f"{levels} cover levels audited exhaustively (n <= 2000); "
        f"max rho={rho_max:.3f}; violations={len(bad)}")
    assert not bad


def test_c08_division(capsys):
    bad, count, worst_bd, worst_bal = [], 0, 0, 0.0
    for spec in FAMILY + LARGE:
        g = parse_spec(spec)
        for eps in ((0.5,) if spec in LARGE else (0.5, 0.35)):
            d = build_division(g, eps)
            cap = size_cap_for(g.n, eps)
            assert cap == math.ceil(eps**-2 * math.log2(g.n))
            count += 1
            for p in d.pieces:
                worst_bd = max(worst_bd, len(p.boundary))
                if len(p.boundary) > 10 or len(p.node_set) > cap:
                    bad.append((spec, eps, p.piece_id))
            for s in d.steps:
                worst_bal = max(worst_bal, s.balance)
                if s.balance > 0.5:
                    bad.append((spec, eps, "balance", s.step_id))
    say(capsys, 8, not bad, f"{count} divisions; max boundary paths={worst_bd}, max balance={worst_bal:.3f}; "
        f"violations={len(bad)}")
    assert not bad


def test_c09_label_scaling(capsys):
    halving, quadrupling = [], []
    for kind in ("grid:{s}x{s}", "wgrid:{s}x{s}:5:1", "dgrid:{s}x{s}:0.15:2"):
        g = parse_spec(kind.format(s=32))
        sizes = [build_labels(g, e).max_entries() for e in (0.5, 0.25, 0.125)]
        halving += [b / a for a, b in zip(sizes, sizes[1:])]
        sizes = [build_labels(parse_spec(kind.format(s=s)), 0.25).max_entries() for s in (16, 32, 64)]
        quadrupling += [b / a for a, b in zip(sizes, sizes[1:])]
    ok = max(halving) <= 2.6 * 1.3 and max(quadrupling) <= 1.5 * 1.3
    say(capsys, 9, ok, f"eps-halving ratios max {max(halving):.2f} (limit {2.6 * 1.3:.2f}), "
        f"n-quadrupling ratios max {max(quadrupling):.2f} (limit {1.5 * 1.3:.2f})")
    assert max(halving) <= 2.6 * 1.3
    assert max(quadrupling) <= 1.5 * 1.3


def test_c10_depth(results, capsys):
    rows, _ = results
    used = [r for r in rows if r["kind"] in ("additive", "eps-moderate")]
    bad = [r for r in used if r["depth"] > 2 + log_star(r["n"])]
    worst = max(r["depth"] for r in used)
    say(capsys, 10, not bad, f"{len(used)} runs; max additive depth={worst} "
        f"(limit at n=20000 is {2 + log_star(20000)}); violations={len(bad)}")
    assert not bad


def test_c11_determinism(tmp_path, capsys):
    configs = [
        RunConfig(gen="grid:12x12", oracle="eps-moderate", eps=0.25, pairs=300, seed=5),
        RunConfig(gen="dgrid:12x12:0.2:3", oracle="const", pairs=300, seed=1),
        RunConfig(gen="wgrid:10x10:5:2", oracle="additive", eps=0.5, pairs="all"),
        RunConfig(gen="pgrid:9x9:2", oracle="eps-poly", eps=0.5, pairs=200, seed=9),
    ]
    same = 0
    for k, cfg in enumerate(configs):
        texts = []
        for rep in ("a", "b"):
            cfg.report = str(tmp_path / rep / f"r{k}.json")
            run(cfg)
            texts.append((tmp_path / rep / f"r{k}.json").read_bytes())
        same += texts[0] == texts[1]
    ok = same == len(configs)
    say(capsys, 11, ok, f"{same}/{len(configs)} configs produced byte-identical reports")
    assert ok
