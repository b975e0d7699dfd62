"""Approximate distance oracles for undirected planar graphs."""

from .additive import AdditiveOracle, DiameterError, build_additive, validate_diameter
from .bench import Report, RunConfig, run, sweep
from .covers import build_cover, build_cover_hierarchy, dominating_set
from .graph import (
    ExactOracle,
    GraphError,
    NonPlanarError,
    PlanarGraph,
    WeightClass,
    embed,
    exact_distance,
    from_edges,
    triangulate,
)
from .io import ParseError, load_graph, parse_dimacs, serialize_dimacs
from .labels import LabelMismatch, build_labels, decode
from .oracles import (
    ConstOracle,
    EpsOracle,
    build_const,
    build_eps,
    build_oracle,
    distance,
    query_const,
    query_eps,
    stats,
)
from .separators import build_division

__version__ = "0.1.0"
