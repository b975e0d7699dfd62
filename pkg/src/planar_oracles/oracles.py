"""Composite oracles: constant stretch, and (1+eps) for moderate or polynomial weights.

Both combine a long-range estimate (nearest landmark + landmark labels +
nearest landmark) with short-range information from the cover hierarchy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .additive import AdditiveOracle, ExactOnly, build_additive
from .covers import CoverHierarchy, DominatingSet, build_cover_hierarchy, dominating_set
from .graph import ExactOracle, PlanarGraph, WeightClass, embed
from .labels import LabelSet, build_labels

DEFAULT_DIVISOR = 6
EXACT_DIAMETER_LIMIT = 3000


def landmark_radius(n: int, eps: float, theta: float) -> int:
    logn = math.log2(max(n, 2))
    return max(1, math.floor(logn ** (theta + 1) / eps))


@dataclass
class ConstOracle:
    g: PlanarGraph
    eps: float
    landmarks: DominatingSet
    labels: LabelSet
    hierarchy: CoverHierarchy
    weight_constant: float = 1.0

    @property
    def rho(self) -> float:
        return self.hierarchy.rho

    @property
    def levels(self) -> list[int]:
        return sorted(self.hierarchy.levels)

    def long_range(self, u: int, v: int) -> float:
        lu, du = self.landmarks.nearest[u]
        lv, dv = self.landmarks.nearest[v]
        mid = 0 if lu == lv else self.labels.distance(lu, lv)
        return du + mid + dv

    def shares(self, level: int, u: int, v: int) -> bool:
        m = self.hierarchy.levels[level].membership
        a, b = m[u], m[v]
        return any(x in b for x in a)

    def transition_level(self, u: int, v: int) -> int | None:
        """A level where u, v share a cluster but did not one level lower.

        Level 0 counts as not shared.  Any such transition certifies
        2^(i-1) < d(u, v) <= 2 rho 2^i, so monotonicity is not needed.
        """
        levels = self.levels
        if not self.shares(levels[-1], u, v):
            return None
        lo, hi = -1, len(levels) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.shares(levels[mid], u, v):
                hi = mid
            else:
                lo = mid
        return levels[hi]

    def short_range(self, u: int, v: int) -> float:
        i = self.transition_level(u, v)
        if i is None:
            return math.inf
        return 2 * self.rho * (1 << i)

    def distance(self, u: int, v: int) -> float:
        if u == v:
            return 0
        return min(self.long_range(u, v), self.short_range(u, v))

    def space(self) -> dict[str, int]:
        return {
            "nearest_landmark": 2 * self.g.n,
            "landmark_labels": self.labels.words(),
            "cover_membership": self.hierarchy.words(),
        }

    def stats(self) -> dict:
        return {
            "oracle": "const",
            "eps": self.eps,
            "delta": self.landmarks.delta,
            "landmarks": len(self.landmarks.landmarks),
            "rho": self.rho,
            "degree_bound": self.hierarchy.degree_bound,
            "stretch_bound": max(1 + 6 * self.eps, 4 * self.rho),
            "levels": self.hierarchy.stats(),
            "max_label_entries": self.labels.max_entries(),
            "words": self.space(),
            "weight_constant": self.weight_constant,
        }


def _base(g: PlanarGraph, eps: float, wc: WeightClass, top: int | None = None):
    if g.rotation is None:
        g = embed(g)
    c = wc.check(g)
    theta = 0.0 if wc.kind == "unit" else wc.theta
    delta = landmark_radius(g.n, eps, theta)
    ds = dominating_set(g, delta)
    labels = build_labels(g, eps, owners=ds.landmarks)
    hierarchy = build_cover_hierarchy(g, eps, delta, top)
    return g, ds, labels, hierarchy, c


def build_const(g: PlanarGraph, wc: WeightClass | None = None, eps: float = 0.5) -> ConstOracle:
    wc = wc or WeightClass("unit")
    if wc.kind == "polynomial":
        raise ValueError("polynomial weights need the (1+eps) oracle in polynomial mode")
    if not 0 < eps <= 0.5:
        raise ValueError("the constant-stretch oracle takes eps in (0, 1/2]")
    g, ds, labels, hierarchy, c = _base(g, eps, wc)
    return ConstOracle(g, eps, ds, labels, hierarchy, c)


def query_const(o: ConstOracle, u: int, v: int) -> float:
    return o.distance(u, v)


@dataclass
class LevelOracles:
    """Additive oracles for every cluster of one cover level."""

    level: int
    oracles: list[AdditiveOracle | ExactOnly]
    local: list[dict[int, int]]


@dataclass
class EpsOracle:
    base: ConstOracle
    eps_user: float
    divisor: float
    mode: str
    per_level: dict[int, LevelOracles]
    lookahead: int
    level_finder: LabelSet | None = None

    @property
    def eps(self) -> float:
        return self.eps_user / self.divisor

    def window(self, u: int, v: int) -> list[int]:
        levels = self.base.levels
        if self.mode == "polynomial":
            est = self.level_finder.distance(u, v)
            ell = max(0, math.ceil(math.log2(est)))
            lo, hi = ell - math.ceil(math.log2(3)), ell + self.lookahead
        else:
            i = self.base.transition_level(u, v)
            if i is None:
                return []
            lo, hi = i, i + self.lookahead
        return [i for i in levels if max(lo, 1) <= i <= hi] or ([levels[0]] if hi < levels[0] else [])

    def distance(self, u: int, v: int) -> float:
        if u == v:
            return 0
        best = self.base.long_range(u, v)
        for i in self.window(u, v):
            lv = self.per_level[i]
            home = self.base.hierarchy.levels[i].home
            # u's own cluster holds its whole 2^i-ball; v's is a free extra try
            for cid in {home[u], home[v]}:
                loc = lv.local[cid]
                if u in loc and v in loc:
                    best = min(best, lv.oracles[cid].query(loc[u], loc[v]))
        return best

    def space(self) -> dict[str, int]:
        out = dict(self.base.space())
        out["additive_oracles"] = sum(o.words() for lv in self.per_level.values() for o in lv.oracles)
        if self.level_finder is not None:
            out["level_finder_labels"] = self.level_finder.words()
        return out

    def stats(self) -> dict:
        depth = max((o.depth for lv in self.per_level.values() for o in lv.oracles), default=0)
        return {
            "oracle": f"eps-{self.mode}",
            "eps": self.eps_user,
            "internal_eps": self.eps,
            "divisor": self.divisor,
            "delta": self.base.landmarks.delta,
            "landmarks": len(self.base.landmarks.landmarks),
            "rho": self.base.rho,
            "degree_bound": self.base.hierarchy.degree_bound,
            "lookahead": self.lookahead,
            "levels": self.base.hierarchy.stats(),
            "additive_depth": depth,
            "max_label_entries": self.base.labels.max_entries(),
            "words": self.space(),
        }


def build_eps(
    g: PlanarGraph,
    eps_user: float,
    wc: WeightClass | None = None,
    divisor: float = DEFAULT_DIVISOR,
) -> EpsOracle:
    if eps_user <= 0:
        raise ValueError("eps must be positive")
    wc = wc or WeightClass("unit")
    eps = min(eps_user / divisor, 0.5)
    mode = "polynomial" if wc.kind == "polynomial" else "moderate"
    top = None
    if mode == "polynomial":
        top = max(1, math.ceil(math.log2(max(2, g.n * g.max_weight))))
        wc_base = WeightClass("polynomial")
    else:
        wc_base = wc
    g, ds, labels, hierarchy, c = _base(g, eps, wc_base, top)
    base = ConstOracle(g, eps, ds, labels, hierarchy, c)
    rho = hierarchy.rho
    per_level = {}
    for i, lv in hierarchy.levels.items():
        oracles, local = [], []
        for cl in lv.clusters:
            sub, order = g.subgraph(cl.nodes)
            oracles.append(build_additive(sub, 1 << i, 2 * rho, eps, validate=None))
            local.append({x: k for k, x in enumerate(order)})
        per_level[i] = LevelOracles(i, oracles, local)
    finder = build_labels(g, 0.5) if mode == "polynomial" else None
    lookahead = max(0, math.ceil(math.log2(2 * rho)))
    return EpsOracle(base, eps_user, divisor, mode, per_level, lookahead, finder)


def query_eps(o: EpsOracle, u: int, v: int) -> float:
    return o.distance(u, v)


class AdditiveHandle:
    """Additive oracle on a whole graph, with Delta set to its diameter."""

    def __init__(self, g: PlanarGraph, eps: float, delta: int | None = None, factor: float = 1.0):
        from .additive import validate_diameter

        if delta is None:
            if g.n <= EXACT_DIAMETER_LIMIT:
                delta = validate_diameter(g, math.inf, "exact")
            else:
                # a sweep value is at least one eccentricity, and the diameter
                # is at most twice any eccentricity
                delta, factor = validate_diameter(g, math.inf, "sampled"), 2.0
            delta = max(delta, 1)
            check = None
        else:
            check = "exact" if g.n <= EXACT_DIAMETER_LIMIT else "sampled"
        self.delta, self.factor, self.eps = delta, factor, eps
        self.oracle = build_additive(g, delta, factor, eps, validate=check)

    def distance(self, u: int, v: int) -> float:
        return self.oracle.query(u, v)

    @property
    def additive_bound(self) -> float:
        return 6 * self.eps * self.delta

    def stats(self) -> dict:
        s = dict(self.oracle.stats())
        s.update({"delta": self.delta, "diameter_factor": self.factor, "eps": self.eps,
                  "additive_bound": self.additive_bound})
        return s


class ExactHandle(ExactOracle):
    pass


ORACLES = ("exact", "const", "eps-moderate", "eps-poly", "additive")


def build_oracle(kind: str, g: PlanarGraph, eps: float = 0.5, theta: float = 0.0):
    """Uniform construction entry point; every handle has distance() and stats()."""
    if kind == "exact":
        return ExactHandle(g)
    if kind == "const":
        wc = WeightClass("unit") if all(w == 1 for _, _, w in g.edges) else WeightClass("moderate", theta)
        return build_const(g, wc, min(eps, 0.5))
    if kind == "eps-moderate":
        wc = WeightClass("unit") if all(w == 1 for _, _, w in g.edges) else WeightClass("moderate", theta)
        return build_eps(g, eps, wc)
    if kind == "eps-poly":
        return build_eps(g, eps, WeightClass("polynomial"))
    if kind == "additive":
        return AdditiveHandle(g, eps)
    raise ValueError(f"unknown oracle {kind!r}; choose from {', '.join(ORACLES)}")


def distance(handle, u: int, v: int) -> float:
    return handle.distance(u, v)


def stats(handle) -> dict:
    return handle.stats()
