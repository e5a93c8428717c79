"""General persistent homology over Z2 via boundary-matrix reduction.

This is the slow, fully general path: clique complexes of graphs, Betti
numbers in any dimension, persistent Betti numbers, and total-persistence
features. It doubles as the brute-force oracle for the fast graph-only
module. Columns of the boundary matrix are represented as Python integers
(bitmasks over row indices), so column addition over Z2 is a single XOR.
"""

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass

from .graphs import Graph, betti_graph
from .filtration import VertexFiltration, degree_filtration

INF = math.inf


class ComplexError(Exception):
    """Raised for structurally invalid simplicial complexes."""


@dataclass(frozen=True)
class SimplicialComplex:
    """Simplices as sorted vertex tuples, each with a filtration value.

    The complex must be closed under faces and filtration-monotone:
    value(face) <= value(simplex).
    """

    simplices: tuple  # of (vertex tuple, value)

    def __post_init__(self):
        cleaned = []
        seen = {}
        for simplex, value in self.simplices:
            s = tuple(sorted(int(v) for v in simplex))
            if len(set(s)) != len(s):
                raise ComplexError(f"repeated vertex in simplex {simplex}")
            if s in seen:
                raise ComplexError(f"duplicate simplex {s}")
            seen[s] = float(value)
            cleaned.append((s, float(value)))
        for s, value in cleaned:
            if len(s) > 1:
                for face in itertools.combinations(s, len(s) - 1):
                    if face not in seen:
                        raise ComplexError(f"missing face {face} of {s}")
                    if seen[face] > value:
                        raise ComplexError(
                            f"filtration not monotone: {face} has larger value than {s}"
                        )
        object.__setattr__(self, "simplices", tuple(cleaned))

    def by_dimension(self, d):
        """All d-simplices with values, in stored order."""
        return [(s, v) for s, v in self.simplices if len(s) == d + 1]

    @property
    def max_dimension(self):
        return max((len(s) - 1 for s, _ in self.simplices), default=-1)

    def max_value(self):
        return max((v for _, v in self.simplices), default=0.0)

    def step_values(self):
        """Sorted distinct filtration values."""
        return tuple(sorted({v for _, v in self.simplices}))

    def to_json(self):
        return json.dumps(
            [{"simplex": list(s), "value": v} for s, v in self.simplices]
        )

    @classmethod
    def from_json(cls, text):
        items = json.loads(text)
        return cls(tuple((tuple(it["simplex"]), it["value"]) for it in items))


@dataclass(frozen=True)
class GeneralDiagram:
    """Per-dimension persistence pairs (birth, death-or-inf)."""

    by_dim: tuple  # tuple of tuples of (birth, death)

    def pairs(self, d):
        return self.by_dim[d] if d < len(self.by_dim) else ()

    def multiset(self, d):
        return Counter(self.pairs(d))

    def essential_counts(self):
        return tuple(
            sum(1 for _, death in pairs if death == INF) for pairs in self.by_dim
        )


def clique_complex(g: Graph, f: VertexFiltration, max_dim: int) -> SimplicialComplex:
    """All cliques of g up to max_dim+1 vertices, valued by max member value."""
    if max_dim < 1:
        raise ComplexError("max_dim must be at least 1")
    adj = [set() for _ in range(g.n_vertices)]
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    simplices = [((v,), f.values[v]) for v in range(g.n_vertices)]
    frontier = [list(e) for e in g.edges]
    for clique in frontier:
        simplices.append((tuple(clique), max(f.values[v] for v in clique)))
    dim = 1
    while dim < max_dim and frontier:
        nxt = []
        for clique in frontier:
            common = set.intersection(*(adj[v] for v in clique))
            last = clique[-1]
            for w in sorted(common):
                if w > last:
                    nxt.append(clique + [w])
        for clique in nxt:
            simplices.append((tuple(clique), max(f.values[v] for v in clique)))
        frontier = nxt
        dim += 1
    return SimplicialComplex(tuple(simplices))


def boundary_matrix(k: SimplicialComplex, d: int):
    """Z2 boundary matrix of dimension d as a list of column bitmasks.

    Columns index the d-simplices, rows the (d-1)-simplices, both in the
    complex's stored order.
    """
    if d < 1:
        raise ComplexError("boundary matrices start at dimension 1")
    rows = {s: i for i, (s, _) in enumerate(k.by_dimension(d - 1))}
    cols = []
    for s, _ in k.by_dimension(d):
        col = 0
        for face in itertools.combinations(s, len(s) - 1):
            col |= 1 << rows[face]
        cols.append(col)
    return cols


def _rank_z2(cols):
    """Rank of a Z2 matrix given as column bitmasks."""
    pivots = {}
    rank = 0
    for col in cols:
        while col:
            low = col.bit_length() - 1
            if low in pivots:
                col ^= pivots[low]
            else:
                pivots[low] = col
                rank += 1
                break
    return rank


def betti_numbers(k: SimplicialComplex, up_to: int):
    """Betti numbers beta_0..beta_up_to via rank-nullity over Z2."""
    counts = [len(k.by_dimension(d)) for d in range(up_to + 2)]
    ranks = [0] * (up_to + 2)
    for d in range(1, up_to + 2):
        if counts[d]:
            ranks[d] = _rank_z2(boundary_matrix(k, d))
    betti = []
    for d in range(up_to + 1):
        betti.append(counts[d] - ranks[d] - ranks[d + 1])
    return tuple(betti)


def _filtration_order(k: SimplicialComplex):
    """Simplices sorted by (value, dimension, lexicographic vertex tuple)."""
    return sorted(k.simplices, key=lambda sv: (sv[1], len(sv[0]), sv[0]))


def reduce_persistence(k: SimplicialComplex) -> GeneralDiagram:
    """Standard column reduction of the full boundary matrix in filtration order.

    Pivot pairs (sigma_i, sigma_j) emit (value(sigma_i), value(sigma_j)) in
    dim(sigma_i); unpaired simplices emit (value, inf).
    """
    ordered = _filtration_order(k)
    index = {s: i for i, (s, _) in enumerate(ordered)}
    n = len(ordered)
    columns = []
    for s, _ in ordered:
        col = 0
        if len(s) > 1:
            for face in itertools.combinations(s, len(s) - 1):
                col |= 1 << index[face]
        columns.append(col)

    low_to_col = {}
    paired = [None] * n  # paired[i] = j if sigma_i killed by sigma_j
    for j in range(n):
        col = columns[j]
        while col:
            low = col.bit_length() - 1
            other = low_to_col.get(low)
            if other is None:
                break
            col ^= columns[other]
        columns[j] = col
        if col:
            low = col.bit_length() - 1
            low_to_col[low] = j
            paired[low] = j

    max_dim = k.max_dimension
    by_dim = [[] for _ in range(max_dim + 1)]
    destroyed = [False] * n
    for i, j in enumerate(paired):
        if j is not None:
            destroyed[j] = True
    for i, (s, value) in enumerate(ordered):
        j = paired[i]
        if j is not None:
            by_dim[len(s) - 1].append((value, ordered[j][1]))
        elif not destroyed[i]:
            by_dim[len(s) - 1].append((value, INF))
    return GeneralDiagram(tuple(tuple(sorted(p)) for p in by_dim))


def persistent_betti(k: SimplicialComplex, d: int, i: int, j: int) -> int:
    """Rank of the persistent homology group between filtration steps i and j.

    Steps are 1-based indices into the sorted distinct filtration values;
    step 0 is the empty complex. Counts diagram points in dimension d born
    at or before step i and still alive strictly after step j.
    """
    if i > j:
        raise ComplexError("persistent Betti requires i <= j")
    steps = k.step_values()
    if j > len(steps) or i < 0:
        raise ComplexError(f"step index out of range (have {len(steps)} steps)")
    if i == 0:
        return 0
    fi, fj = steps[i - 1], steps[j - 1]
    diag = reduce_persistence(k)
    return sum(1 for b, death in diag.pairs(d) if b <= fi and death > fj)


def multiplicity_from_betti(k: SimplicialComplex, d: int, i: int, j: int) -> int:
    """Multiplicity of the tuple (step i, step j) recovered by inclusion-exclusion
    over the persistent Betti table."""

    def pb(a, b):
        return persistent_betti(k, d, a, b)

    return (pb(i, j - 1) - pb(i, j)) - (pb(i - 1, j - 1) - pb(i - 1, j))


def total_persistence(diag: GeneralDiagram, essential_substitute: float):
    """Sum of |death - birth| per dimension, infinity replaced by the substitute."""
    finite_deaths = [
        death for pairs in diag.by_dim for _, death in pairs if death != INF
    ]
    if finite_deaths and essential_substitute < max(finite_deaths):
        raise ComplexError("essential substitute must be >= max finite death")
    totals = []
    for pairs in diag.by_dim:
        total = 0.0
        for b, death in pairs:
            if death == INF:
                death = essential_substitute
            total += abs(death - b)
        totals.append(total)
    return tuple(totals)


def persistence_features(g: Graph, max_dim: int, substitute_offset: float = 0.0):
    """Total-persistence feature vector of a graph under the degree filtration.

    The essential substitute is the maximum filtration value plus
    substitute_offset. The offset exists because the exact substitute
    convention in prior total-persistence tables is ambiguous; both 0 and 1
    are worth reporting.
    """
    f = degree_filtration(g)
    k = clique_complex(g, f, max_dim)
    diag = reduce_persistence(k)
    totals = total_persistence(diag, f.max_value() + substitute_offset)
    # Pad so graphs without higher simplices still compare positionally.
    padded = list(totals) + [0.0] * (max_dim + 1 - len(totals))
    return tuple(padded[: max_dim + 1])


def distinguishability_count(graphs, max_dim: int, substitute_offset: float = 0.0,
                             tolerance: float = 1e-9):
    """Count unordered pairs of graphs with equal total-persistence features.

    Returns (pairs, indistinguishable).
    """
    if len(graphs) < 2:
        return (len(graphs) * (len(graphs) - 1) // 2, 0)
    feats = [persistence_features(g, max_dim, substitute_offset) for g in graphs]
    n = len(feats)
    pairs = n * (n - 1) // 2
    indistinguishable = 0
    for a in range(n):
        for b in range(a + 1, n):
            if len(feats[a]) == len(feats[b]) and all(
                abs(x - y) <= tolerance for x, y in zip(feats[a], feats[b])
            ):
                indistinguishable += 1
    return (pairs, indistinguishable)


def graph_as_complex(g: Graph, f: VertexFiltration) -> SimplicialComplex:
    """The graph itself as a 1-dimensional filtered complex."""
    return clique_complex(g, f, 1)


def tetrahedron_boundary(value: float = 0.0) -> SimplicialComplex:
    """The boundary of a tetrahedron: a triangulated 2-sphere."""
    simplices = []
    for k_size in (1, 2, 3):
        for s in itertools.combinations(range(4), k_size):
            simplices.append((s, value))
    return SimplicialComplex(tuple(simplices))


# Minimal 7-vertex triangulation of the torus: faces (i, i+1, i+3) and
# (i, i+2, i+3) mod 7, giving 7 vertices, 21 edges, 14 triangles.
_TORUS_FACES = tuple(
    tuple(sorted(((i + a) % 7, (i + b) % 7, (i + c) % 7)))
    for i in range(7)
    for a, b, c in ((0, 1, 3), (0, 2, 3))
)


def torus_minimal(value: float = 0.0) -> SimplicialComplex:
    """The minimal 7-vertex triangulation of the 2-torus."""
    simplices = set()
    for face in _TORUS_FACES:
        simplices.add(face)
        for edge in itertools.combinations(face, 2):
            simplices.add(edge)
        for v in face:
            simplices.add((v,))
    return SimplicialComplex(tuple((s, value) for s in sorted(simplices, key=lambda s: (len(s), s))))


def euler_check(g: Graph) -> bool:
    """Cross-check the graph Euler relation against the Z2 cycle-space rank."""
    f = VertexFiltration((0.0,) * g.n_vertices, g.n_vertices)
    k = graph_as_complex(g, f)
    b = betti_numbers(k, 1)
    pair = betti_graph(g)
    return b == (pair.b0, pair.b1)
