import json
import random

import numpy as np
import pytest

from graphtopo.graphs import Graph, GraphError
from graphtopo.filtration import (
    FiltrationError,
    FiltrationMLP,
    VertexFiltration,
    apply_mlp,
    degree_filtration,
    filtration_steps,
    induced_edge_value,
    make_injective,
    sublevel_graph,
)

from conftest import random_graph


def test_degree_filtration_worked_example(worked_graph):
    f = degree_filtration(worked_graph)
    assert f.values == (1.0, 1.0, 3.0, 3.0, 2.0)


def test_degree_filtration_edgeless():
    assert degree_filtration(Graph(4)).values == (0.0,) * 4


def test_degree_filtration_cycle():
    g = Graph(5, tuple((i, (i + 1) % 5) for i in range(5)))
    assert degree_filtration(g).values == (2.0,) * 5


def test_filtration_requires_matching_size():
    with pytest.raises(FiltrationError):
        VertexFiltration((1.0, 2.0), 3)


def test_filtration_rejects_nonfinite():
    with pytest.raises(FiltrationError):
        VertexFiltration((1.0, float("nan")), 2)


def test_induced_edge_value():
    f = VertexFiltration((1.0, 3.0), 2)
    assert induced_edge_value(f, (0, 1)) == 3.0
    f2 = VertexFiltration((2.0, 2.0), 2)
    assert induced_edge_value(f2, (0, 1)) == 2.0


def test_induced_edge_value_worked_example(worked_graph):
    f = degree_filtration(worked_graph)
    # Every edge of the example enters at value 3.
    assert all(induced_edge_value(f, e) == 3.0 for e in worked_graph.edges)


def test_filtration_steps():
    assert filtration_steps(VertexFiltration((1, 1, 3, 3, 2), 5)) == (1, 2, 3)
    assert filtration_steps(VertexFiltration((1, 2, 3, 4, 5), 5)) == (1, 2, 3, 4, 5)
    assert filtration_steps(VertexFiltration((7, 7, 7), 3)) == (7,)


def test_sublevel_worked_example(worked_graph):
    f = degree_filtration(worked_graph)
    sub, index_map = sublevel_graph(worked_graph, f, 2.0)
    assert index_map == (0, 1, 4)  # vertices A, B, E
    assert sub.edges == ()


def test_sublevel_extremes(worked_graph):
    f = degree_filtration(worked_graph)
    empty, _ = sublevel_graph(worked_graph, f, 0.5)
    assert empty.n_vertices == 0
    full, index_map = sublevel_graph(worked_graph, f, 3.0)
    assert full.n_vertices == worked_graph.n_vertices
    assert full.edges == worked_graph.edges
    assert index_map == tuple(range(5))


def test_sublevel_nesting():
    rng = random.Random(11)
    for _ in range(20):
        g = random_graph(rng)
        f = VertexFiltration(
            tuple(rng.choice([0.0, 1.0, 2.0]) for _ in range(g.n_vertices)),
            g.n_vertices,
        )
        previous = set()
        prev_edges = set()
        for step in filtration_steps(f):
            sub, index_map = sublevel_graph(g, f, step)
            vertices = set(index_map)
            edges = {(index_map[u], index_map[v]) for u, v in sub.edges}
            assert previous <= vertices
            assert prev_edges <= edges
            previous, prev_edges = vertices, edges
        assert previous == set(range(g.n_vertices))


def test_make_injective_ties():
    f = VertexFiltration((1, 1, 3, 3, 2), 5)
    fi = make_injective(f, 0.1)
    assert fi.is_injective()
    assert max(abs(a - b) for a, b in zip(f.values, fi.values)) < 0.1
    # Strict order of the original groups is preserved.
    for u in range(5):
        for v in range(5):
            if f.values[u] < f.values[v]:
                assert fi.values[u] < fi.values[v]


def test_make_injective_identity_on_injective():
    f = VertexFiltration((1, 2, 3), 3)
    assert make_injective(f, 0.5) is f


def test_make_injective_all_equal():
    f = VertexFiltration((2.0,) * 5, 5)
    fi = make_injective(f, 0.25)
    assert fi.is_injective()
    assert all(abs(v - 2.0) < 0.25 for v in fi.values)


def test_make_injective_rejects_bad_epsilon():
    with pytest.raises(FiltrationError):
        make_injective(VertexFiltration((1, 1), 2), 0.0)


def _identity_mlp(d):
    return FiltrationMLP(
        W1=np.eye(d), b1=np.zeros(d), W2=np.eye(d), b2=np.zeros(d),
        activation="identity",
    )


def test_apply_mlp_identity(worked_graph):
    degrees = degree_filtration(worked_graph)
    g = worked_graph.with_attributes([(v,) for v in degrees.values])
    family = apply_mlp(_identity_mlp(1), g)
    assert family.k == 1
    assert family.per_filtration[0].values == degrees.values


def test_apply_mlp_zero_weights():
    g = Graph(3, ((0, 1),)).with_attributes([(1.0,), (2.0,), (3.0,)])
    mlp = FiltrationMLP(
        W1=np.zeros((4, 1)), b1=np.zeros(4), W2=np.zeros((2, 4)), b2=np.zeros(2),
        activation="relu",
    )
    family = apply_mlp(mlp, g)
    assert all(f.values == (0.0, 0.0, 0.0) for f in family.per_filtration)


def test_apply_mlp_matches_hand_computation():
    # 4-vertex path, 2-dim attributes, seeded weights; the oracle below is
    # a plain-Python forward pass, independent of the numpy implementation.
    g = Graph(4, ((0, 1), (1, 2), (2, 3))).with_attributes(
        [(0.5, -1.0), (1.0, 0.25), (-0.5, 2.0), (0.0, 1.5)]
    )
    mlp = FiltrationMLP.random(d=2, hidden=3, k=2, activation="sigmoid", seed=42)

    import math

    def forward(x):
        hidden = []
        for i in range(3):
            pre = sum(mlp.W1[i][j] * x[j] for j in range(2)) + mlp.b1[i]
            hidden.append(1.0 / (1.0 + math.exp(-pre)))
        return [
            sum(mlp.W2[i][j] * hidden[j] for j in range(3)) + mlp.b2[i]
            for i in range(2)
        ]

    family = apply_mlp(mlp, g)
    for v, attrs in enumerate(g.attributes):
        expected = forward(attrs)
        for i in range(2):
            assert family.per_filtration[i].values[v] == pytest.approx(expected[i])


def test_apply_mlp_requires_attributes(worked_graph):
    with pytest.raises(GraphError):
        apply_mlp(_identity_mlp(1), worked_graph)


def test_apply_mlp_dimension_mismatch():
    g = Graph(2, ((0, 1),)).with_attributes([(1.0, 2.0), (3.0, 4.0)])
    with pytest.raises(FiltrationError):
        apply_mlp(_identity_mlp(3), g)


def test_mlp_json_roundtrip():
    mlp = FiltrationMLP.random(d=2, hidden=4, k=3, seed=1)
    restored = FiltrationMLP.from_json(mlp.to_json())
    assert np.allclose(restored.W1, mlp.W1)
    assert np.allclose(restored.b2, mlp.b2)
    assert restored.activation == mlp.activation


def test_filtration_json_roundtrip():
    f = VertexFiltration((1.5, 2.0, -3.0), 3)
    assert VertexFiltration.from_json(f.to_json()) == f
    assert json.loads(f.to_json()) == [1.5, 2.0, -3.0]
