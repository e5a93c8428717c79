"""End-to-end acceptance checks.

Each test prints a single PASS line with the measured quantity so the suite
doubles as a report. Tolerances and corpus sizes are stated inline; the two
regular-graph corpus checks are gated on data files and skip when absent.
"""

import os
import random
import time
from collections import Counter

import numpy as np
import pytest

from graphtopo.graphs import Graph, betti_graph, parse_graph6_file
from graphtopo.filtration import VertexFiltration, degree_filtration
from graphtopo.persistence import diagram_multiset, diagrams_equal, ph_graph
from graphtopo.simplicial import (
    betti_numbers,
    distinguishability_count,
    graph_as_complex,
    reduce_persistence,
    tetrahedron_boundary,
    torus_minimal,
)
from graphtopo.wl import wl_distinguish, wl_filtration
from graphtopo.embedding import DiagramMatrix, embed_deepsets, random_spec
from graphtopo.grad import NonInjectiveError, OrderChangeError, finite_diff_check
from graphtopo.synth import gen_cycles, gen_necklaces

from conftest import random_graph, random_injective_filtration

INF = float("inf")
DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "data")


def _report(line):
    print(f"\nACCEPTANCE PASS: {line}")


def _best_time(fn, repeats=5):
    best = INF
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_01_worked_example_exactness():
    g = Graph(5, ((0, 3), (1, 2), (2, 3), (2, 4), (3, 4)))

    d = ph_graph(g, degree_filtration(g))
    assert diagram_multiset(d, 0) == Counter(
        {(1.0, INF): 1, (1.0, 3.0): 1, (2.0, 3.0): 1, (3.0, 3.0): 2}
    )
    assert diagram_multiset(d, 1) == Counter({(3.0, INF): 1})

    f = VertexFiltration((1, 2, 3, 4, 5), 5)
    d2 = ph_graph(g, f)
    assert diagram_multiset(d2, 0) == Counter(
        {(1.0, INF): 1, (3.0, 3.0): 1, (2.0, 4.0): 1, (4.0, 4.0): 1,
         (5.0, 5.0): 1}
    )
    assert diagram_multiset(d2, 1) == Counter({(5.0, INF): 1})

    t_deg = _best_time(lambda: ph_graph(g, degree_filtration(g)))
    t_inj = _best_time(lambda: ph_graph(g, f))
    assert t_deg < 1e-3 and t_inj < 1e-3
    _report(
        "criterion 1 worked-example diagrams exact; "
        f"{t_deg * 1e6:.0f} us and {t_inj * 1e6:.0f} us per run (< 1 ms)"
    )


def test_02_expressivity_instance():
    tri2 = Graph(6, ((0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)))
    hexagon = Graph(6, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)))

    for max_iter in range(11):
        assert wl_distinguish(tri2, hexagon, max_iter) is None

    assert (betti_graph(tri2).b0, betti_graph(tri2).b1) == (2, 2)
    assert (betti_graph(hexagon).b0, betti_graph(hexagon).b1) == (1, 1)

    f = VertexFiltration((1.0,) * 6, 6)
    d_tri = ph_graph(tri2, f)
    d_hex = ph_graph(hexagon, f)
    assert not diagrams_equal(d_tri, d_hex)
    _report(
        "criterion 2 two-triangles vs hexagon: refinement blind at every "
        "max_iter <= 10, Betti (2,2) vs (1,1), constant-filtration "
        "diagrams differ"
    )


def test_03_betti_fixtures():
    sphere = tetrahedron_boundary()
    torus = torus_minimal()
    assert list(betti_numbers(sphere, 2)) == [1, 0, 1]
    assert list(betti_numbers(torus, 2)) == [1, 2, 1]
    t_s = _best_time(lambda: betti_numbers(tetrahedron_boundary(), 2))
    t_t = _best_time(lambda: betti_numbers(torus_minimal(), 2))
    assert t_s < 1e-2 and t_t < 1e-2
    _report(
        "criterion 3 sphere (1,0,1) and torus (1,2,1) exact; "
        f"{t_s * 1e3:.2f} ms and {t_t * 1e3:.2f} ms (< 10 ms)"
    )


def test_04_oracle_equivalence():
    rng = random.Random(1234)
    t0 = time.perf_counter()
    for _ in range(200):
        g = random_graph(rng, n_max=12, p=0.3)
        f = random_injective_filtration(rng, g)
        d = ph_graph(g, f)
        oracle = reduce_persistence(graph_as_complex(g, f))
        assert diagram_multiset(d, 0) == oracle.multiset(0)
        assert diagram_multiset(d, 1) == oracle.multiset(1)
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    _report(
        "criterion 4 union-find vs boundary-reduction oracle: 200/200 "
        f"random graphs equal in dims 0-1, {elapsed:.1f} s (< 30 s)"
    )


def test_05_refinement_implies_diagram_difference():
    rng = random.Random(99)
    found = 0
    attempts = 0
    while found < 100:
        attempts += 1
        assert attempts < 5000, "could not sample enough diverging pairs"
        a = random_graph(rng, n_max=10, p=0.35)
        b = random_graph(rng, n_max=10, p=0.35)
        h = wl_distinguish(a, b, max_iter=4)
        if h is None:
            continue
        fa, fb = wl_filtration(a, b, h=max(h, 1))
        da = ph_graph(a, fa)
        db = ph_graph(b, fb)
        assert not diagrams_equal(da, db), (a, b, h)
        found += 1
    _report(
        "criterion 5 refinement-separated pairs yield unequal diagrams: "
        f"100/100 (from {attempts} sampled pairs)"
    )


def _hinge_gap(spec, g, f):
    """Distance from every diagram coordinate to the nearest non-smooth point
    of the embedder. Only the triangle and rational hat functions have kinks;
    configurations landing near one are resampled rather than asserted on."""
    if spec.kind not in ("triangle", "rational_hat"):
        return INF
    from graphtopo.embedding import build_matrix

    d = ph_graph(g, f)
    gaps = [INF]
    for dim in (0, 1):
        m = build_matrix([d], dim)
        for b, de in m.data[m.mask]:
            if spec.kind == "triangle":
                for t in spec.params["samples"]:
                    gaps += [abs(t - b), abs(de - t), abs((t - b) - (de - t))]
            else:
                r = spec.params["radius"]
                for cb, cd in spec.params["centers"]:
                    l1 = abs(b - cb) + abs(de - cd)
                    gaps += [abs(l1 - r), abs(b - cb), abs(de - cd)]
    return min(gaps)


def _scaled_injective_filtration(rng, g):
    # Values kept inside the embedders' working range [0, 4] so the loss has
    # nonvanishing gradients; distinct multiples of 0.04 stay injective with
    # a value gap far above the 1e-5 finite-difference step.
    vals = rng.sample(range(100), g.n_vertices)
    return VertexFiltration(tuple(v / 25.0 for v in vals), g.n_vertices)


def test_06_gradient_contract():
    rng = random.Random(2024)
    worst = 0.0
    for kind in ("triangle", "gaussian", "line", "rational_hat", "deepsets"):
        checked = 0
        seed = 0
        while checked < 50:
            seed += 1
            g = random_graph(rng, n_max=8, p=0.4)
            f = _scaled_injective_filtration(rng, g)
            spec = random_spec(kind, k=1, output_dim=3, seed=seed)
            if _hinge_gap(spec, g, f) < 1e-3:
                continue
            try:
                err = finite_diff_check(g, f, spec, 1e-5)
            except OrderChangeError:
                continue
            assert err < 1e-4, (kind, seed, err)
            worst = max(worst, err)
            checked += 1

    g = Graph(5, ((0, 3), (1, 2), (2, 3), (2, 4), (3, 4)))
    with pytest.raises(NonInjectiveError):
        finite_diff_check(g, degree_filtration(g),
                          random_spec("gaussian", 1, 2, seed=0), 1e-5)
    _report(
        "criterion 6 finite-difference check: 50 configs per embedder kind, "
        f"max relative error {worst:.2e} (< 1e-4); tied filtrations rejected"
    )


def _regular_corpus_check(path, expected_pairs, expected_indistinguishable):
    graphs = parse_graph6_file(open(path).read())
    results = {}
    for offset in (0.0, 1.0):
        results[offset] = distinguishability_count(
            graphs, max_dim=4, substitute_offset=offset
        )
    matched = [
        offset
        for offset, (pairs, indist) in results.items()
        if pairs == expected_pairs and indist == expected_indistinguishable
    ]
    assert matched, (
        f"no substitute convention matches ({expected_pairs}, "
        f"{expected_indistinguishable}); got {results}"
    )
    return len(graphs), matched


def test_07_regular_corpus_r4_n10():
    path = os.path.join(DATA_DIR, "r4-n10.g6")
    if not os.path.exists(path):
        pytest.skip("data/r4-n10.g6 not present (data-file-gated check)")
    t0 = time.perf_counter()
    n_graphs, matched = _regular_corpus_check(path, 1711, 229)
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    _report(
        f"criterion 7a quartic corpus ({n_graphs} graphs): 1711 pairs, "
        f"229 indistinguishable under substitute offset(s) {matched}, "
        f"{elapsed:.1f} s (< 60 s)"
    )


def test_07_regular_corpus_r3_n12():
    path = os.path.join(DATA_DIR, "r3-n12.g6")
    if not os.path.exists(path):
        pytest.skip("data/r3-n12.g6 not present (data-file-gated check)")
    n_graphs, matched = _regular_corpus_check(path, 3570, 712)
    _report(
        f"criterion 7b cubic corpus ({n_graphs} graphs): 3570 pairs, "
        f"712 indistinguishable under substitute offset(s) {matched}"
    )


def test_08_synthetic_data_invariants():
    cycles = gen_cycles(1000, seed=7)
    assert len(cycles) == 1000
    assert all(
        (betti_graph(s.graph).b0 > 1) == (s.label == 1) for s in cycles
    )
    cycles2 = gen_cycles(1000, seed=7)
    assert [(s.graph.edges, s.label) for s in cycles] == [
        (s.graph.edges, s.label) for s in cycles2
    ]

    necklaces = gen_necklaces(1000, seed=7)
    betti = {
        (betti_graph(s.graph).b0, betti_graph(s.graph).b1) for s in necklaces
    }
    assert len(betti) == 1
    necklaces2 = gen_necklaces(1000, seed=7)
    assert [s.graph.edges for s in necklaces] == [
        s.graph.edges for s in necklaces2
    ]
    _report(
        "criterion 8 cycles: component-count indicator 1000/1000; necklaces: "
        f"Betti constant at {betti.pop()} across classes; both deterministic"
    )


def test_09_declared_not_reproducible_and_performance():
    # The learned-model benchmark numbers in the source tables require
    # trained networks and are declared out of scope; the property and
    # oracle checks above stand in for them. The engineering target below
    # is the only runtime claim made here.
    rng = np.random.default_rng(0)
    n = 100_000
    m = 1_000_000
    pairs = rng.integers(0, n, size=(int(m * 1.2), 2))
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    pairs = np.unique(np.sort(pairs, axis=1), axis=0)[:m]
    assert len(pairs) == m
    g = Graph(n, tuple(map(tuple, pairs.tolist())))
    values = rng.permutation(n).astype(float)
    f = VertexFiltration(tuple(values.tolist()), n)

    t0 = time.perf_counter()
    d = ph_graph(g, f)
    elapsed = time.perf_counter() - t0
    assert len(d.d0) == n
    assert elapsed < 5.0
    _report(
        "criterion 9 benchmark accuracies declared not reproducible at desk "
        f"scale; 1,000,000-edge persistence in {elapsed:.2f} s (< 5 s)"
    )


def test_10_deepsets_properties():
    rng = np.random.default_rng(42)
    spec = random_spec("deepsets", k=1, output_dim=3, seed=6)
    for trial in range(100):
        rows = int(rng.integers(2, 12))
        data = rng.uniform(0.0, 5.0, size=(rows, 2))
        mask = np.ones(rows, dtype=bool)
        m = DiagramMatrix(data, mask, 5.0)
        out, ctx = embed_deepsets(spec, m)

        perm = rng.permutation(rows)
        out_p, ctx_p = embed_deepsets(
            spec, DiagramMatrix(data[perm], mask[perm], 5.0)
        )
        assert np.array_equal(ctx, ctx_p), trial
        assert np.array_equal(out_p, out[perm]), trial

        dup = DiagramMatrix(
            np.vstack([data, data[:1]]), np.ones(rows + 1, dtype=bool), 5.0
        )
        _, ctx_dup = embed_deepsets(spec, dup)
        assert not np.array_equal(ctx, ctx_dup), trial
    _report(
        "criterion 10 set encoder: bit-identical permutation invariance and "
        "strict duplicate-row sensitivity on 100/100 random matrices"
    )
