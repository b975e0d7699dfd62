import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import apsp, path_graph, star
from planar_oracles.covers import (
    build_cover,
    build_cover_hierarchy,
    dominating_set,
    level_range,
    shared_subgraph,
)
from planar_oracles.generators import deleted_grid, grid, random_weighted_grid
from planar_oracles.graph import sssp


def _check_dominating(g, ds, unit):
    D = apsp(g)
    L = list(ds.landmarks)
    assert L
    near = D[:, L].min(axis=1)
    assert (near <= ds.delta).all()
    for x, (lm, d) in enumerate(ds.nearest):
        assert d == D[x, lm] == near[x]
    if unit:
        assert len(L) <= max(1, g.n // (ds.delta + 1))


@given(st.integers(2, 10), st.integers(2, 10), st.integers(0, 12))
@settings(max_examples=40, deadline=None)
def test_dominating_unit(r, c, delta):
    g = grid(r, c)
    _check_dominating(g, dominating_set(g, delta), unit=True)


@given(st.integers(3, 9), st.integers(1, 8), st.integers(1, 15), st.integers(0, 99))
@settings(max_examples=30, deadline=None)
def test_dominating_weighted(size, w, delta, seed):
    g = random_weighted_grid(size, size, w, seed)
    _check_dominating(g, dominating_set(g, delta), unit=False)


def test_star_center_suffices():
    g = star(50)
    ds = dominating_set(g, 1)
    assert ds.landmarks == (0,)


def test_path_bound():
    g = path_graph(100)
    ds = dominating_set(g, 3)
    assert len(ds.landmarks) <= 25
    _check_dominating(g, ds, unit=True)


def test_negative_delta():
    with pytest.raises(ValueError):
        dominating_set(grid(2, 2), -1)


def _audit_cover(g, lv, D):
    r = lv.radius
    member = [set(m) for m in lv.membership]
    # coverage: every r-ball inside one cluster
    for x in range(g.n):
        ball = set((D[x] <= r).nonzero()[0].tolist())
        assert any(ball <= set(lv.clusters[c].nodes) for c in member[x])
        # in particular the cluster grown from x's own cell
        assert ball <= set(lv.clusters[lv.home[x]].nodes)
    for cid, cl in enumerate(lv.clusters):
        assert cl.center in cl.nodes
        for x in cl.nodes:
            assert cid in member[x]
        sub, order = g.subgraph(cl.nodes)
        assert max(sssp(sub, order.index(cl.center)).dist) == cl.depth


@pytest.mark.parametrize(
    "g",
    [grid(10, 10), random_weighted_grid(9, 9, 4, 3), deleted_grid(10, 10, 0.2, 2), path_graph(30)],
    ids=["grid", "wgrid", "dgrid", "path"],
)
def test_cover_hierarchy(g):
    D = apsp(g)
    delta = math.floor(2 * math.log2(g.n))
    h = build_cover_hierarchy(g, 0.5, delta)
    assert h.rho <= 2.0
    for i, lv in h.levels.items():
        assert lv.radius == 2**i
        _audit_cover(g, lv, D)
        assert lv.max_membership <= h.degree_bound
        assert lv.max_depth <= h.rho * lv.radius
    stats = h.stats()
    assert [s["level"] for s in stats] == sorted(h.levels)
    assert h.words() > g.n


def test_level_range_grid_example():
    g = grid(10, 10)
    delta = math.floor(2 * math.log2(100))
    levels = level_range(g, 0.5, delta)
    assert levels[0] == 1
    assert 2 ** levels[-1] <= math.ceil(2 * delta / 0.5)


def test_top_level_spans_graph():
    g = grid(6, 6)
    h = build_cover_hierarchy(g, 0.5, 100)
    assert len(h.levels[h.top].clusters) == 1


def test_shared_subgraph():
    g = grid(6, 6)
    lv = build_cover(g, 2, 1)
    assert shared_subgraph(build_cover_hierarchy(g, 0.5, 3), 1, 0, 1) is not None
    assert lv.membership[0]
