"""Vertex filtration functions and sublevel-set machinery.

A vertex filtration assigns a real value to every vertex; edges inherit the
maximum of their endpoint values. Sublevel sets of these values induce the
nested sequence of subgraphs that drives persistence.
"""

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graphs import Graph, GraphError


class FiltrationError(Exception):
    """Raised for invalid filtration inputs."""


@dataclass(frozen=True)
class VertexFiltration:
    """Per-vertex real values for a graph with graph_n vertices."""

    values: tuple
    graph_n: int

    def __post_init__(self):
        vals = tuple(float(x) for x in self.values)
        if len(vals) != self.graph_n:
            raise FiltrationError(
                f"expected {self.graph_n} values, got {len(vals)}"
            )
        if any(not math.isfinite(x) for x in vals):
            raise FiltrationError("filtration values must be finite")
        object.__setattr__(self, "values", vals)

    def is_injective(self):
        return len(set(self.values)) == len(self.values)

    def max_value(self):
        return max(self.values) if self.values else 0.0

    def to_json(self):
        return json.dumps(list(self.values))

    @classmethod
    def from_json(cls, text):
        vals = json.loads(text)
        return cls(tuple(vals), len(vals))


@dataclass(frozen=True)
class FiltrationFamily:
    """A family of k vertex filtrations over the same graph."""

    per_filtration: tuple

    def __post_init__(self):
        if len(self.per_filtration) < 1:
            raise FiltrationError("a filtration family needs k >= 1 members")
        n = self.per_filtration[0].graph_n
        if any(f.graph_n != n for f in self.per_filtration):
            raise FiltrationError("all family members must cover the same graph")

    @property
    def k(self):
        return len(self.per_filtration)


_ACTIVATIONS = {
    "identity": lambda x: x,
    "relu": lambda x: np.maximum(x, 0.0),
    "sigmoid": lambda x: 1.0 / (1.0 + np.exp(-x)),
}


@dataclass(frozen=True)
class FiltrationMLP:
    """A one-hidden-layer MLP mapping vertex attributes to k filtration values.

    Weights are loaded from config, never trained here; the gradient module
    exposes what an external trainer needs.
    """

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    activation: str = "sigmoid"

    def __post_init__(self):
        object.__setattr__(self, "W1", np.asarray(self.W1, dtype=float))
        object.__setattr__(self, "b1", np.asarray(self.b1, dtype=float))
        object.__setattr__(self, "W2", np.asarray(self.W2, dtype=float))
        object.__setattr__(self, "b2", np.asarray(self.b2, dtype=float))
        if self.activation not in _ACTIVATIONS:
            raise FiltrationError(f"unknown activation {self.activation!r}")
        hidden, d = self.W1.shape
        k, hidden2 = self.W2.shape
        if hidden2 != hidden or self.b1.shape != (hidden,) or self.b2.shape != (k,):
            raise FiltrationError("MLP weight shapes are inconsistent")

    @property
    def input_dim(self):
        return self.W1.shape[1]

    @property
    def output_dim(self):
        return self.W2.shape[0]

    def to_json(self):
        return json.dumps(
            {
                "d": self.input_dim,
                "hidden": self.W1.shape[0],
                "k": self.output_dim,
                "activation": self.activation,
                "W1": self.W1.tolist(),
                "b1": self.b1.tolist(),
                "W2": self.W2.tolist(),
                "b2": self.b2.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text):
        cfg = json.loads(text)
        mlp = cls(
            W1=np.asarray(cfg["W1"]),
            b1=np.asarray(cfg["b1"]),
            W2=np.asarray(cfg["W2"]),
            b2=np.asarray(cfg["b2"]),
            activation=cfg.get("activation", "sigmoid"),
        )
        if "d" in cfg and cfg["d"] != mlp.input_dim:
            raise FiltrationError("declared input dim does not match W1")
        if "k" in cfg and cfg["k"] != mlp.output_dim:
            raise FiltrationError("declared output dim does not match W2")
        return mlp

    @classmethod
    def random(cls, d, hidden=32, k=8, activation="sigmoid", seed=0, scale=1.0):
        rng = np.random.default_rng(seed)
        return cls(
            W1=rng.normal(scale=scale, size=(hidden, d)),
            b1=rng.normal(scale=scale, size=hidden),
            W2=rng.normal(scale=scale, size=(k, hidden)),
            b2=rng.normal(scale=scale, size=k),
            activation=activation,
        )


def degree_filtration(g: Graph) -> VertexFiltration:
    """f(v) = degree of v."""
    return VertexFiltration(tuple(float(d) for d in g.degrees()), g.n_vertices)


def apply_mlp(mlp: FiltrationMLP, g: Graph) -> FiltrationFamily:
    """Evaluate the MLP on every vertex attribute; collect per-coordinate filtrations."""
    if g.attributes is None:
        raise GraphError("graph has no vertex attributes")
    x = np.asarray(g.attributes, dtype=float)
    if x.shape[1] != mlp.input_dim:
        raise FiltrationError(
            f"attribute dim {x.shape[1]} does not match MLP input dim {mlp.input_dim}"
        )
    h = _ACTIVATIONS[mlp.activation](x @ mlp.W1.T + mlp.b1)
    out = h @ mlp.W2.T + mlp.b2  # shape (n, k)
    return FiltrationFamily(
        tuple(
            VertexFiltration(tuple(out[:, i]), g.n_vertices)
            for i in range(mlp.output_dim)
        )
    )


def induced_edge_value(f: VertexFiltration, edge) -> float:
    """Edge value under the max convention."""
    u, v = edge
    return max(f.values[u], f.values[v])


def filtration_steps(f: VertexFiltration):
    """Sorted distinct vertex values: the thresholds where the sublevel graph changes."""
    return tuple(sorted(set(f.values)))


def sublevel_graph(g: Graph, f: VertexFiltration, threshold: float):
    """Subgraph on vertices with f(v) <= threshold.

    Returns (subgraph, index_map) where index_map[i] is the original vertex
    index of subgraph vertex i.
    """
    if f.graph_n != g.n_vertices:
        raise FiltrationError("filtration does not match graph size")
    keep = [v for v in range(g.n_vertices) if f.values[v] <= threshold]
    index_map = tuple(keep)
    rev = {v: i for i, v in enumerate(keep)}
    edges = tuple(
        (rev[u], rev[v])
        for u, v in g.edges
        if max(f.values[u], f.values[v]) <= threshold
    )
    attrs = None
    if g.attributes is not None:
        attrs = tuple(g.attributes[v] for v in keep)
    return Graph(len(keep), edges, attrs), index_map


def make_injective(f: VertexFiltration, epsilon: float) -> VertexFiltration:
    """Perturb f into an injective filtration within sup-distance epsilon.

    Within each group of tied vertices, the j-th vertex (by index order)
    receives an offset of j * delta / (n + 1), where delta is epsilon capped
    at the smallest gap between distinct values so that the strict order of
    untied vertices is preserved.
    """
    if epsilon <= 0:
        raise FiltrationError("epsilon must be positive")
    if f.is_injective():
        return f
    n = f.graph_n
    distinct = sorted(set(f.values))
    min_gap = min(
        (b - a for a, b in zip(distinct, distinct[1:])), default=epsilon
    )
    delta = min(epsilon, min_gap)
    groups = {}
    for v, val in enumerate(f.values):
        groups.setdefault(val, []).append(v)
    new_vals = list(f.values)
    for val, members in groups.items():
        for j, v in enumerate(members):
            new_vals[v] = val + j * delta / (n + 1)
    return VertexFiltration(tuple(new_vals), n)
