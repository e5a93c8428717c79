"""Gradient routing from persistence diagram coordinates to filtration values.

For an injective vertex filtration, every non-dummy diagram coordinate is
exactly one vertex's filtration value, so the backward pass is index
selection: the adjoint scatters upstream gradients onto the routed vertices.
A finite-difference harness verifies the whole chain end to end.
"""

import json
from dataclasses import dataclass

import numpy as np

from .graphs import Graph
from .filtration import VertexFiltration, FiltrationError
from .persistence import DiagramPair, ph_graph, INF
from .embedding import (
    EmbedderSpec,
    build_matrix,
    embed,
    embed_input_grad,
)


class GradError(Exception):
    pass


class NonInjectiveError(GradError):
    """The filtration has tied vertex values; apply make_injective first."""


class OrderChangeError(GradError):
    """The finite-difference step would change the filtration order."""


@dataclass(frozen=True)
class RoutingMap:
    """coordinate (dim, row, component) -> source vertex index.

    component 0 is the birth, component 1 the death. Dummy coordinates are
    absent. routes is a plain dict so it can be serialized for external
    autodiff integration.
    """

    routes: dict
    n_vertices: int
    n_edges: int

    def source(self, dim, row, component):
        return self.routes.get((dim, row, component))

    def to_json(self):
        return json.dumps(
            {
                "n_vertices": self.n_vertices,
                "n_edges": self.n_edges,
                "routes": [
                    {"dim": k[0], "row": k[1], "component": k[2], "vertex": v}
                    for k, v in sorted(self.routes.items())
                ],
            }
        )


def _argmax_endpoint(g: Graph, f: VertexFiltration, eid: int) -> int:
    u, v = g.edges[eid]
    return u if f.values[u] > f.values[v] else v


def build_routing(
    g: Graph,
    f: VertexFiltration,
    d: DiagramPair,
    infinity_substitute_source=None,
    route_infinity=True,
) -> RoutingMap:
    """Build the coordinate -> vertex map for a diagram of (g, f).

    Births of dimension 0 route to the creating vertex; finite deaths to the
    arg-max endpoint of the destroying edge; dimension-1 births to the
    arg-max endpoint of the cycle-creating edge. Infinite deaths, which the
    matrix layout replaces by the maximum filtration value, route to the
    global arg-max vertex (or receive no gradient if route_infinity=False).
    """
    if not f.is_injective():
        raise NonInjectiveError(
            "filtration has tied values; use make_injective before routing"
        )
    if infinity_substitute_source is None:
        infinity_substitute_source = max(
            range(f.graph_n), key=lambda v: f.values[v]
        )
    routes = {}
    for p in d.d0:
        routes[(0, p.creator, 0)] = p.creator
        if p.death == INF:
            if route_infinity:
                routes[(0, p.creator, 1)] = infinity_substitute_source
        else:
            routes[(0, p.creator, 1)] = _argmax_endpoint(g, f, p.destroyer)
    for eid, p in enumerate(d.d1_by_edge):
        if p is None:
            continue
        routes[(1, eid, 0)] = _argmax_endpoint(g, f, p.creator)
        if p.death == INF:
            if route_infinity:
                routes[(1, eid, 1)] = infinity_substitute_source
        else:
            routes[(1, eid, 1)] = _argmax_endpoint(g, f, p.destroyer)
    return RoutingMap(routes, g.n_vertices, g.n_edges)


def backward(routing: RoutingMap, upstream_dim0, upstream_dim1=None):
    """Scatter upstream gradients onto vertices.

    upstream_dim0 is an (n_vertices, 2) array of gradients w.r.t. the dim-0
    matrix coordinates, upstream_dim1 an (n_edges, 2) array for dim 1 (may
    be omitted). Returns the gradient w.r.t. f as a length-n vector.
    """
    upstream_dim0 = np.asarray(upstream_dim0, dtype=float)
    if upstream_dim0.shape != (routing.n_vertices, 2):
        raise GradError(
            f"dim-0 upstream must be ({routing.n_vertices}, 2), got {upstream_dim0.shape}"
        )
    grad = np.zeros(routing.n_vertices)
    if upstream_dim1 is not None:
        upstream_dim1 = np.asarray(upstream_dim1, dtype=float)
        if upstream_dim1.shape != (routing.n_edges, 2):
            raise GradError(
                f"dim-1 upstream must be ({routing.n_edges}, 2), got {upstream_dim1.shape}"
            )
    for (dim, row, comp), vertex in routing.routes.items():
        if dim == 0:
            grad[vertex] += upstream_dim0[row, comp]
        elif upstream_dim1 is not None:
            grad[vertex] += upstream_dim1[row, comp]
    return grad


def _pipeline_loss(g: Graph, f: VertexFiltration, spec: EmbedderSpec):
    """Scalar loss: sum of embedding outputs over both dimensions."""
    d = ph_graph(g, f)
    m0 = build_matrix([d], 0)
    m1 = build_matrix([d], 1)
    loss = float(embed(spec, m0)[m0.mask].sum())
    if m1.rows:
        loss += float(embed(spec, m1)[m1.mask].sum())
    return loss


def analytic_gradient(g: Graph, f: VertexFiltration, spec: EmbedderSpec):
    """Analytic gradient of the pipeline loss w.r.t. f, via routing."""
    d = ph_graph(g, f)
    routing = build_routing(g, f, d)
    m0 = build_matrix([d], 0)
    up0 = embed_input_grad(spec, m0).reshape(m0.rows, 1, 2)[:, 0, :]
    if d.n_edges:
        m1 = build_matrix([d], 1)
        up1 = embed_input_grad(spec, m1).reshape(m1.rows, 1, 2)[:, 0, :]
    else:
        up1 = np.zeros((0, 2))
    return backward(routing, up0, up1)


def finite_diff_check(g: Graph, f: VertexFiltration, spec: EmbedderSpec, h: float,
                      atol: float = 1e-12):
    """Max relative error between analytic and central-difference gradients.

    Requires an injective filtration and a step small enough that no
    filtration order changes within +-h (checked against the minimal gap
    between vertex values).
    """
    if h <= 0:
        raise GradError("step h must be positive")
    if not f.is_injective():
        raise NonInjectiveError("filtration has tied values")
    sorted_vals = sorted(f.values)
    min_gap = min(
        (b - a for a, b in zip(sorted_vals, sorted_vals[1:])), default=np.inf
    )
    if 2 * h >= min_gap:
        raise OrderChangeError(
            f"step {h} can change filtration order (min value gap {min_gap})"
        )
    analytic = analytic_gradient(g, f, spec)
    fd = np.zeros(f.graph_n)
    for v in range(f.graph_n):
        plus = list(f.values)
        minus = list(f.values)
        plus[v] += h
        minus[v] -= h
        lp = _pipeline_loss(g, VertexFiltration(tuple(plus), f.graph_n), spec)
        lm = _pipeline_loss(g, VertexFiltration(tuple(minus), f.graph_n), spec)
        fd[v] = (lp - lm) / (2 * h)
    # Normalize by the overall gradient scale rather than per component, so
    # that finite-difference roundoff on near-zero components does not
    # dominate the reported error.
    denom = max(np.max(np.abs(analytic), initial=0.0),
                np.max(np.abs(fd), initial=0.0))
    if denom <= atol:
        return 0.0
    return float(np.max(np.abs(analytic - fd)) / denom)
