import math
import random
from collections import Counter

import pytest

from graphtopo.graphs import Graph, betti_graph
from graphtopo.filtration import (
    FiltrationError,
    VertexFiltration,
    degree_filtration,
    induced_edge_value,
)
from graphtopo.persistence import (
    INF,
    DiagramPair,
    PersistencePair,
    diagram_from_json,
    diagram_multiset,
    diagram_to_json,
    diagrams_equal,
    ph_graph,
)
from graphtopo.simplicial import graph_as_complex, reduce_persistence

from conftest import random_graph, random_injective_filtration


def test_worked_example_degree(worked_graph):
    d = ph_graph(worked_graph, degree_filtration(worked_graph))
    assert diagram_multiset(d, 0) == Counter(
        {(1.0, INF): 1, (1.0, 3.0): 1, (2.0, 3.0): 1, (3.0, 3.0): 2}
    )
    assert diagram_multiset(d, 1) == Counter({(3.0, INF): 1})


def test_worked_example_injective(worked_graph):
    f = VertexFiltration((1, 2, 3, 4, 5), 5)
    d = ph_graph(worked_graph, f)
    assert diagram_multiset(d, 0) == Counter(
        {(1.0, INF): 1, (3.0, 3.0): 1, (2.0, 4.0): 1, (4.0, 4.0): 1, (5.0, 5.0): 1}
    )
    assert diagram_multiset(d, 1) == Counter({(5.0, INF): 1})


def test_worked_example_provenance(worked_graph):
    # The (2, 4) tuple belongs to the vertex with value 2 (B); it dies when
    # the C-D edge merges its component into the older one founded by A.
    f = VertexFiltration((1, 2, 3, 4, 5), 5)
    d = ph_graph(worked_graph, f)
    pair = d.d0[1]
    assert (pair.birth, pair.death) == (2.0, 4.0)
    assert pair.creator == 1
    assert worked_graph.edges[pair.destroyer] == (2, 3)


def test_edgeless_graph():
    f = VertexFiltration((0.0, 0.0, 0.0), 3)
    d = ph_graph(Graph(3), f)
    assert diagram_multiset(d, 0) == Counter({(0.0, INF): 3})
    assert d.d1_by_edge == ()


def test_two_triangles_constant(two_triangles):
    # Frozen from the boundary-matrix reduction oracle on this complex.
    f = VertexFiltration((1.0,) * 6, 6)
    d = ph_graph(two_triangles, f)
    assert diagram_multiset(d, 0) == Counter({(1.0, INF): 2, (1.0, 1.0): 4})
    assert diagram_multiset(d, 1) == Counter({(1.0, INF): 2})
    oracle = reduce_persistence(graph_as_complex(two_triangles, f))
    assert diagram_multiset(d, 0) == oracle.multiset(0)
    assert diagram_multiset(d, 1) == oracle.multiset(1)


def test_d0_cardinality_and_creator_bijection():
    rng = random.Random(5)
    for _ in range(30):
        g = random_graph(rng)
        f = random_injective_filtration(rng, g)
        d = ph_graph(g, f)
        assert len(d.d0) == g.n_vertices
        assert sorted(p.creator for p in d.d0) == list(range(g.n_vertices))
        pair = betti_graph(g)
        assert sum(1 for p in d.d0 if p.essential) == pair.b0
        assert len(d.d1_pairs()) == pair.b1


def test_births_and_deaths_match_filtration():
    rng = random.Random(6)
    for _ in range(30):
        g = random_graph(rng)
        f = random_injective_filtration(rng, g)
        d = ph_graph(g, f)
        for p in d.d0:
            assert p.birth == f.values[p.creator]
            if not p.essential:
                assert p.death == induced_edge_value(f, g.edges[p.destroyer])
        for eid, p in enumerate(d.d1_by_edge):
            if p is not None:
                assert p.creator == eid
                assert p.birth == induced_edge_value(f, g.edges[eid])


def test_deterministic_rerun(worked_graph):
    f = VertexFiltration((1, 2, 3, 4, 5), 5)
    assert ph_graph(worked_graph, f) == ph_graph(worked_graph, f)


def test_permutation_invariance_of_multisets():
    rng = random.Random(9)
    for _ in range(20):
        g = random_graph(rng)
        f = random_injective_filtration(rng, g)
        perm = list(range(g.n_vertices))
        rng.shuffle(perm)
        gp = g.permuted(perm)
        vals = [0.0] * g.n_vertices
        for v in range(g.n_vertices):
            vals[perm[v]] = f.values[v]
        fp = VertexFiltration(tuple(vals), g.n_vertices)
        assert diagrams_equal(ph_graph(g, f), ph_graph(gp, fp))


def test_oracle_equivalence_sample():
    rng = random.Random(2)
    for _ in range(50):
        g = random_graph(rng)
        f = random_injective_filtration(rng, g)
        d = ph_graph(g, f)
        oracle = reduce_persistence(graph_as_complex(g, f))
        assert diagram_multiset(d, 0) == oracle.multiset(0)
        assert diagram_multiset(d, 1) == oracle.multiset(1)


def test_diagrams_equal_self(worked_graph):
    d = ph_graph(worked_graph, degree_filtration(worked_graph))
    assert diagrams_equal(d, d)


def test_size_mismatch_rejected(worked_graph):
    with pytest.raises(FiltrationError):
        ph_graph(worked_graph, VertexFiltration((1.0, 2.0), 2))


def test_pair_validation():
    with pytest.raises(ValueError):
        PersistencePair(2.0, 1.0, 0)
    with pytest.raises(ValueError):
        PersistencePair(1.0, INF, 0, destroyer=3)


def test_json_roundtrip(worked_graph):
    f = VertexFiltration((1, 2, 3, 4, 5), 5)
    d = ph_graph(worked_graph, f)
    restored = diagram_from_json(diagram_to_json(d))
    assert restored == d
    # Dummy slots can be dropped from exports.
    no_dummies = diagram_to_json(d, include_dummies=False)
    assert '"dummy"' not in no_dummies
