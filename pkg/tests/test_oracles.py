import math
import random

import pytest

from conftest import apsp, path_graph, star
from planar_oracles.generators import grid, parse_spec, random_weighted_grid
from planar_oracles.graph import WeightClass, embed, from_edges
from planar_oracles.oracles import (
    build_const,
    build_eps,
    build_oracle,
    distance,
    landmark_radius,
    query_const,
    query_eps,
    stats,
)


def _pairs(n, count, seed=0):
    rng = random.Random(seed)
    return [(rng.randrange(n), rng.randrange(n)) for _ in range(count)]


def test_single_edge():
    g = embed(from_edges(2, [(0, 1, 1)]))
    o = build_const(g)
    assert query_const(o, 0, 1) >= 1
    assert o.transition_level(0, 1) == 1
    assert query_const(o, 1, 1) == 0


def test_star_single_landmark():
    o = build_const(star(50))
    assert o.landmarks.landmarks == (0,)


def test_const_grid_stretch():
    g = grid(20, 20)
    o = build_const(g, eps=0.5)
    D = apsp(g)
    long_cut = o.landmarks.delta / o.eps
    bound_long, bound_short = 1 + 6 * o.eps, 4 * o.rho
    for u, v in _pairs(g.n, 500):
        est, d = o.distance(u, v), D[u, v]
        assert est >= d
        if d == 0:
            assert est == 0
        elif d >= long_cut:
            assert est <= bound_long * d
        else:
            assert est <= bound_short * d
    s = o.stats()
    assert s["stretch_bound"] == max(1 + 6 * 0.5, 4 * o.rho) <= 96
    assert set(s["words"]) == {"nearest_landmark", "landmark_labels", "cover_membership"}


def test_const_rejects_polynomial_and_large_eps():
    with pytest.raises(ValueError):
        build_const(grid(4, 4), WeightClass("polynomial"))
    with pytest.raises(ValueError):
        build_const(grid(4, 4), eps=0.75)


def test_eps_path_all_pairs():
    g = path_graph(65)
    o = build_eps(g, 0.5)
    D = apsp(g)
    for u in range(g.n):
        for v in range(g.n):
            assert D[u, v] <= query_eps(o, u, v) <= 1.5 * D[u, v]


def test_eps_weighted_moderate():
    g = random_weighted_grid(16, 16, 8, 11)
    o = build_eps(g, 0.25, WeightClass("moderate", 1.0))
    D = apsp(g)
    for u, v in _pairs(g.n, 1000, 3):
        assert D[u, v] <= o.distance(u, v) <= 1.25 * D[u, v] + 1e-9


def test_eps_polynomial_mode():
    g = parse_spec("pgrid:12x12:5")
    assert g.max_weight == 144**2
    o = build_eps(g, 0.5, WeightClass("polynomial"))
    assert o.mode == "polynomial" and o.level_finder is not None
    D = apsp(g)
    for u, v in _pairs(g.n, 1500, 5):
        assert D[u, v] <= o.distance(u, v) <= 1.5 * D[u, v]
    assert "level_finder_labels" in o.stats()["words"]


@pytest.mark.parametrize("divisor", [1, 2])
def test_eps_without_full_division_stays_within_six_eps(divisor):
    # A smaller divisor leaves room for real portal detours; the analysis
    # still caps the stretch at 1 + 6 * eps / divisor.
    g = grid(24, 24)
    eps = 0.5
    o = build_eps(g, eps, divisor=divisor)
    assert o.stats()["additive_depth"] >= 1
    D = apsp(g)
    worst = 1.0
    for u, v in _pairs(g.n, 2500, divisor):
        est = o.distance(u, v)
        assert est >= D[u, v]
        if D[u, v]:
            worst = max(worst, est / D[u, v])
    assert worst <= 1 + 6 * eps / divisor


def test_eps_parameter_errors():
    with pytest.raises(ValueError):
        build_eps(grid(3, 3), 0)
    with pytest.raises(ValueError):
        build_oracle("bogus", grid(3, 3))


def test_uniform_interface():
    g = grid(10, 10)
    D = apsp(g)
    for kind in ("exact", "const", "eps-moderate", "eps-poly", "additive"):
        h = build_oracle(kind, g, 0.5)
        assert distance(h, 3, 3) == 0
        assert distance(h, 0, 99) >= D[0, 99]
        s = stats(h)
        assert "words" in s


def test_const_space_not_above_eps_space():
    g = grid(14, 14)
    c = build_const(g, eps=0.5).space()
    e = build_eps(g, 0.5).space()
    assert sum(c.values()) <= sum(e.values())


def test_landmark_radius():
    assert landmark_radius(100, 0.5, 1.0) == math.floor(math.log2(100) ** 2 / 0.5)
    assert landmark_radius(1, 0.5, 0.0) >= 1
