import numpy as np
import pytest
from scipy.sparse.csgraph import dijkstra

from planar_oracles.generators import deleted_grid, grid, random_weighted_grid


def apsp(g) -> np.ndarray:
    """Independent reference: scipy all-pairs Dijkstra."""
    return dijkstra(g.csr, directed=False)


def path_graph(n: int):
    from planar_oracles.graph import embed, from_edges

    return embed(from_edges(n, [(i, i + 1, 1) for i in range(n - 1)]))


def star(leaves: int):
    from planar_oracles.graph import embed, from_edges

    return embed(from_edges(leaves + 1, [(0, i, 1) for i in range(1, leaves + 1)]))


@pytest.fixture(scope="session")
def small_family():
    return [
        ("grid8", grid(8, 8)),
        ("wgrid", random_weighted_grid(8, 9, 6, 1)),
        ("dgrid", deleted_grid(9, 9, 0.2, 4)),
        ("path", path_graph(40)),
    ]
