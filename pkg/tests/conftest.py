import random

import pytest
from hypothesis import strategies as st

from graphtopo.graphs import Graph
from graphtopo.filtration import VertexFiltration


@pytest.fixture
def worked_graph():
    """The 5-vertex example graph: vertices A..E = 0..4, edges A-D, B-C,
    C-D, C-E, D-E. Degrees are (1, 1, 3, 3, 2)."""
    return Graph(5, ((0, 3), (1, 2), (2, 3), (2, 4), (3, 4)))


@pytest.fixture
def two_triangles():
    return Graph(6, ((0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)))


@pytest.fixture
def hexagon():
    return Graph(6, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)))


def random_graph(rng: random.Random, n_max=12, p=0.3):
    n = rng.randint(1, n_max)
    edges = tuple(
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if rng.random() < p
    )
    return Graph(n, edges)


def random_injective_filtration(rng: random.Random, g: Graph):
    values = rng.sample(range(10 * (g.n_vertices + 1)), g.n_vertices)
    return VertexFiltration(tuple(float(v) for v in values), g.n_vertices)


@st.composite
def graphs(draw, max_n=10):
    n = draw(st.integers(min_value=1, max_value=max_n))
    all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(all_pairs),
                         max_size=len(all_pairs)))
    edges = tuple(e for e, keep in zip(all_pairs, mask) if keep)
    return Graph(n, edges)
