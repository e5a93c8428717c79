"""Graph representation, parsing/serialization, and whole-graph Betti numbers.

Graphs are undirected and simple: no self-loops, no duplicate edges.
Edges are stored normalized as (u, v) with u < v, sorted lexicographically,
so that every downstream computation is deterministic.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence


class GraphError(Exception):
    """Raised for invalid graph structure."""


class ParseError(GraphError):
    """Raised when parsing a graph from text or bytes fails."""


@dataclass(frozen=True)
class Graph:
    """An undirected simple graph with optional per-vertex attributes.

    Attributes, if present, are a tuple of equal-length tuples of floats,
    one per vertex.
    """

    n_vertices: int
    edges: tuple = ()
    attributes: Optional[tuple] = None

    def __post_init__(self):
        if self.n_vertices < 0:
            raise GraphError("n_vertices must be nonnegative")
        normalized = []
        seen = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise GraphError(f"edge ({u}, {v}) out of range for n={self.n_vertices}")
            if (u, v) in seen:
                raise GraphError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            normalized.append((u, v))
        normalized.sort()
        object.__setattr__(self, "edges", tuple(normalized))
        if self.attributes is not None:
            attrs = tuple(tuple(float(x) for x in row) for row in self.attributes)
            if len(attrs) != self.n_vertices:
                raise GraphError("attributes must have one row per vertex")
            if attrs:
                d = len(attrs[0])
                if any(len(row) != d for row in attrs):
                    raise GraphError("attribute rows must have uniform dimension")
            object.__setattr__(self, "attributes", attrs)

    @property
    def n_edges(self):
        return len(self.edges)

    def degrees(self):
        """Return the degree of every vertex as a list."""
        deg = [0] * self.n_vertices
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self):
        """Return adjacency lists (sorted neighbor lists)."""
        adj = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for nbrs in adj:
            nbrs.sort()
        return adj

    def with_attributes(self, attributes):
        return Graph(self.n_vertices, self.edges, tuple(attributes))

    def permuted(self, perm: Sequence[int]):
        """Relabel vertices: vertex i becomes perm[i]."""
        edges = [(perm[u], perm[v]) for u, v in self.edges]
        attrs = None
        if self.attributes is not None:
            attrs = [None] * self.n_vertices
            for i, row in enumerate(self.attributes):
                attrs[perm[i]] = row
        return Graph(self.n_vertices, tuple(edges), attrs)


@dataclass(frozen=True)
class BettiPair:
    """Betti numbers of a graph: b0 connected components, b1 independent cycles."""

    b0: int
    b1: int


def parse_edge_list(text: str) -> Graph:
    """Parse a line-oriented edge list.

    Each non-comment line is "u v" with 0-based vertex indices. An optional
    header line "n <count>" fixes the vertex count; otherwise it is inferred
    as 1 + max endpoint. Lines starting with '#' and blank lines are skipped.
    Duplicate edges are collapsed.
    """
    n = None
    edges = set()
    max_vertex = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "n":
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: malformed header {raw!r}")
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError(f"line {lineno}: malformed header {raw!r}")
            continue
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer endpoint in {raw!r}")
        if u < 0 or v < 0:
            raise ParseError(f"line {lineno}: negative vertex index in {raw!r}")
        if u == v:
            raise GraphError(f"line {lineno}: self-loop at vertex {u}")
        if u > v:
            u, v = v, u
        edges.add((u, v))
        max_vertex = max(max_vertex, v)
    if n is None:
        n = max_vertex + 1
    elif max_vertex >= n:
        raise ParseError(f"edge endpoint {max_vertex} exceeds declared n={n}")
    return Graph(n, tuple(sorted(edges)))


def serialize_edge_list(g: Graph) -> str:
    """Serialize a graph in the edge-list format, with an 'n' header."""
    lines = [f"n {g.n_vertices}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def _g6_decode_n(data: bytes):
    """Decode the leading vertex count of a graph6 line; return (n, offset)."""
    if not data:
        raise ParseError("empty graph6 input")
    if data[0] == 126:  # '~' marks the long forms
        if len(data) >= 4 and data[1] != 126:
            chunk = data[1:4]
            _check_g6_bytes(chunk)
            n = ((chunk[0] - 63) << 12) | ((chunk[1] - 63) << 6) | (chunk[2] - 63)
            return n, 4
        if len(data) >= 8 and data[1] == 126:
            chunk = data[2:8]
            _check_g6_bytes(chunk)
            n = 0
            for b in chunk:
                n = (n << 6) | (b - 63)
            return n, 8
        raise ParseError("truncated graph6 size prefix")
    _check_g6_bytes(data[:1])
    return data[0] - 63, 1


def _check_g6_bytes(chunk: bytes):
    for b in chunk:
        if not (63 <= b <= 126):
            raise ParseError(f"graph6 byte {b} outside printable range 63..126")


def parse_graph6(data) -> Graph:
    """Decode a single graph6-encoded line into a Graph.

    Handles the short form (n < 63) and both long forms.
    """
    if isinstance(data, str):
        data = data.strip().encode("ascii")
    else:
        data = bytes(data).strip()
    n, offset = _g6_decode_n(data)
    payload = data[offset:]
    _check_g6_bytes(payload)
    n_bits = n * (n - 1) // 2
    expected = (n_bits + 5) // 6
    if len(payload) != expected:
        raise ParseError(
            f"graph6 payload length {len(payload)} does not match n={n} (expected {expected})"
        )
    bits = []
    for b in payload:
        x = b - 63
        bits.extend(((x >> s) & 1) for s in (5, 4, 3, 2, 1, 0))
    edges = []
    idx = 0
    for v in range(1, n):
        for u in range(v):
            if bits[idx]:
                edges.append((u, v))
            idx += 1
    return Graph(n, tuple(edges))


def to_graph6(g: Graph) -> str:
    """Encode a graph in graph6 format (upper triangle, column order)."""
    n = g.n_vertices
    if n < 63:
        prefix = chr(n + 63)
    elif n < 2 ** 18:
        prefix = "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    else:
        prefix = "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))
    adj = set(g.edges)
    bits = []
    for v in range(1, n):
        for u in range(v):
            bits.append(1 if (u, v) in adj else 0)
    while len(bits) % 6:
        bits.append(0)
    chars = []
    for i in range(0, len(bits), 6):
        x = 0
        for b in bits[i : i + 6]:
            x = (x << 1) | b
        chars.append(chr(x + 63))
    return prefix + "".join(chars)


def parse_graph6_file(text: str):
    """Parse a multi-line graph6 file into a list of Graphs."""
    graphs = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith(">>graph6<<"):
            line = line[len(">>graph6<<"):]
        graphs.append(parse_graph6(line))
    return graphs


def connected_components(g: Graph):
    """Return a list of components, each a sorted list of vertex indices."""
    parent = list(range(g.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    comps = {}
    for v in range(g.n_vertices):
        comps.setdefault(find(v), []).append(v)
    return sorted(comps.values())


def betti_graph(g: Graph) -> BettiPair:
    """Betti numbers of the graph as a 1-complex.

    b0 counts connected components (isolated vertices included); b1 follows
    from the Euler relation b1 = |E| - |V| + b0.
    """
    b0 = len(connected_components(g))
    b1 = g.n_edges - g.n_vertices + b0
    return BettiPair(b0, b1)
