"""Embedding functions over families of persistence diagrams.

Diagrams of k filtrations are concatenated into a rows x 2k matrix (rows
indexed by vertices in dimension 0 and by edges in dimension 1). Local
point transformations (triangle, Gaussian, line, rational hat) act row by
row; the DeepSets embedder pools over all unmasked rows and therefore
captures interactions between diagram points.

Each embedder also exposes the analytic gradient of the sum of its outputs
with respect to the input matrix, which the gradient-routing module needs.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .persistence import DiagramPair, INF


class EmbeddingError(Exception):
    pass


LOCAL_KINDS = ("triangle", "gaussian", "line", "rational_hat")
KINDS = LOCAL_KINDS + ("deepsets",)


@dataclass(frozen=True)
class DiagramMatrix:
    """A rows x 2k matrix of (birth, death) columns plus a row mask."""

    data: np.ndarray
    mask: np.ndarray
    infinity_substitute: float

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        mask = np.asarray(self.mask, dtype=bool)
        if data.ndim != 2 or data.shape[1] % 2 != 0:
            raise EmbeddingError("diagram matrix must be rows x 2k")
        if mask.shape != (data.shape[0],):
            raise EmbeddingError("mask must have one entry per row")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "mask", mask)

    @property
    def k(self):
        return self.data.shape[1] // 2

    @property
    def rows(self):
        return self.data.shape[0]


def build_matrix(diagrams, dim: int, infinity_substitute=None) -> DiagramMatrix:
    """Concatenate k diagrams of one graph into the matrix layout.

    Dimension 0 rows are vertices (pair of the creating vertex); dimension 1
    rows are edges, with the dummy tuple (0, 0) for edges that create no
    cycle. Infinite deaths are replaced by infinity_substitute, defaulting
    to each diagram's maximum filtration value. The dim-1 mask marks rows
    that hold a real cycle pair in at least one filtration.
    """
    diagrams = list(diagrams)
    if not diagrams:
        raise EmbeddingError("need at least one diagram")
    if dim not in (0, 1):
        raise EmbeddingError("dimension must be 0 or 1")
    n_rows = diagrams[0].n_vertices if dim == 0 else diagrams[0].n_edges
    for d in diagrams:
        if (d.n_vertices, d.n_edges) != (diagrams[0].n_vertices, diagrams[0].n_edges):
            raise EmbeddingError("diagrams come from graphs of different sizes")
    k = len(diagrams)
    data = np.zeros((n_rows, 2 * k))
    mask = np.zeros(n_rows, dtype=bool)
    subst_used = infinity_substitute
    for i, d in enumerate(diagrams):
        subst = d.max_filtration if infinity_substitute is None else infinity_substitute
        subst_used = subst
        if dim == 0:
            for p in d.d0:
                death = subst if p.death == INF else p.death
                data[p.creator, 2 * i] = p.birth
                data[p.creator, 2 * i + 1] = death
            mask[:] = True
        else:
            for eid, p in enumerate(d.d1_by_edge):
                if p is None:
                    continue
                death = subst if p.death == INF else p.death
                data[eid, 2 * i] = p.birth
                data[eid, 2 * i + 1] = death
                mask[eid] = True
    return DiagramMatrix(data, mask, float(subst_used))


@dataclass(frozen=True)
class EmbedderSpec:
    """Parameters of one embedding function.

    Local kinds share the layout: per-point features for each of the k
    (birth, death) pairs are concatenated and linearly mixed to output_dim
    via mix_W / mix_b. The deepsets kind instead carries weight lists for
    the per-point MLP (phi), the post-pool MLP (rho), and a final affine map
    applied to [phi(row), pooled context].
    """

    kind: str
    output_dim: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise EmbeddingError(f"unknown embedder kind {self.kind!r}")

    def to_json(self):
        def conv(x):
            return x.tolist() if isinstance(x, np.ndarray) else x

        params = {
            key: [conv(w) for w in val] if isinstance(val, list) else conv(val)
            for key, val in self.params.items()
        }
        return json.dumps({"kind": self.kind, "output_dim": self.output_dim,
                           "params": params})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(obj["kind"], obj["output_dim"], obj["params"])


def random_spec(kind, k, output_dim, seed=0, n_atoms=4, hidden=8, scale=1.0):
    """A seeded random EmbedderSpec, mainly for tests and demos."""
    rng = np.random.default_rng(seed)
    n_features = k * n_atoms
    if kind == "triangle":
        params = {
            "samples": rng.uniform(0.0, 4.0, size=n_atoms).tolist(),
            "mix_W": (scale * rng.normal(size=(output_dim, n_features))).tolist(),
            "mix_b": (scale * rng.normal(size=output_dim)).tolist(),
        }
    elif kind == "gaussian":
        params = {
            "centers": rng.uniform(0.0, 4.0, size=(n_atoms, 2)).tolist(),
            "sigma": 1.0 + rng.uniform(0.0, 1.0),
            "mix_W": (scale * rng.normal(size=(output_dim, n_features))).tolist(),
            "mix_b": (scale * rng.normal(size=output_dim)).tolist(),
        }
    elif kind == "line":
        params = {
            "directions": rng.normal(size=(n_atoms, 2)).tolist(),
            "offsets": rng.normal(size=n_atoms).tolist(),
            "mix_W": (scale * rng.normal(size=(output_dim, n_features))).tolist(),
            "mix_b": (scale * rng.normal(size=output_dim)).tolist(),
        }
    elif kind == "rational_hat":
        params = {
            "centers": rng.uniform(0.0, 4.0, size=(n_atoms, 2)).tolist(),
            "radius": 1.0 + rng.uniform(0.0, 1.0),
            "mix_W": (scale * rng.normal(size=(output_dim, n_features))).tolist(),
            "mix_b": (scale * rng.normal(size=output_dim)).tolist(),
        }
    elif kind == "deepsets":
        phi = [
            ((scale * rng.normal(size=(hidden, 2 * k))).tolist(),
             (scale * rng.normal(size=hidden)).tolist()),
            ((scale * rng.normal(size=(hidden, hidden))).tolist(),
             (scale * rng.normal(size=hidden)).tolist()),
        ]
        rho = [
            ((scale * rng.normal(size=(hidden, hidden))).tolist(),
             (scale * rng.normal(size=hidden)).tolist()),
        ]
        final = ((scale * rng.normal(size=(output_dim, 2 * hidden))).tolist(),
                 (scale * rng.normal(size=output_dim)).tolist())
        params = {"phi": phi, "rho": rho, "final": final}
    else:
        raise EmbeddingError(f"unknown embedder kind {kind!r}")
    return EmbedderSpec(kind, output_dim, params)


def _local_features(spec, points):
    """Per-point feature values and their gradients w.r.t. (birth, death).

    points has shape (rows, k, 2); returns (features, grads) with features of
    shape (rows, k, n_atoms) and grads of shape (rows, k, n_atoms, 2).
    """
    rows, k, _ = points.shape
    b = points[..., 0][..., None]  # (rows, k, 1)
    d = points[..., 1][..., None]
    if spec.kind == "triangle":
        t = np.asarray(spec.params["samples"], dtype=float)  # (n_atoms,)
        left = t - b
        right = d - t
        inner = np.minimum(left, right)
        feat = np.maximum(inner, 0.0)
        active = inner > 0.0
        left_min = left < right
        gb = np.where(active & left_min, -1.0, 0.0)
        gd = np.where(active & ~left_min, 1.0, 0.0)
    elif spec.kind == "gaussian":
        centers = np.asarray(spec.params["centers"], dtype=float)  # (n_atoms, 2)
        sigma = float(spec.params["sigma"])
        db = b - centers[:, 0]
        dd = d - centers[:, 1]
        feat = np.exp(-(db ** 2 + dd ** 2) / (2.0 * sigma ** 2))
        gb = feat * (-db / sigma ** 2)
        gd = feat * (-dd / sigma ** 2)
    elif spec.kind == "line":
        directions = np.asarray(spec.params["directions"], dtype=float)
        offsets = np.asarray(spec.params["offsets"], dtype=float)
        feat = b * directions[:, 0] + d * directions[:, 1] + offsets
        gb = np.broadcast_to(directions[:, 0], feat.shape).copy()
        gd = np.broadcast_to(directions[:, 1], feat.shape).copy()
    elif spec.kind == "rational_hat":
        centers = np.asarray(spec.params["centers"], dtype=float)
        r = float(spec.params["radius"])
        db = b - centers[:, 0]
        dd = d - centers[:, 1]
        u = np.abs(db) + np.abs(dd)
        feat = 1.0 / (1.0 + u) - 1.0 / (1.0 + np.abs(r - u))
        dfdu = -1.0 / (1.0 + u) ** 2 - np.sign(r - u) / (1.0 + np.abs(r - u)) ** 2
        gb = dfdu * np.sign(db)
        gd = dfdu * np.sign(dd)
    else:
        raise EmbeddingError(f"{spec.kind!r} is not a local kind")
    grads = np.stack([gb, gd], axis=-1)
    return feat, grads


def embed_local(spec: EmbedderSpec, m: DiagramMatrix):
    """Row-local embedding: output row r depends only on input row r."""
    if spec.kind not in LOCAL_KINDS:
        raise EmbeddingError(f"{spec.kind!r} is not a local kind")
    points = m.data.reshape(m.rows, m.k, 2)
    feat, _ = _local_features(spec, points)
    flat = feat.reshape(m.rows, -1)
    mix_W = np.asarray(spec.params["mix_W"], dtype=float)
    mix_b = np.asarray(spec.params["mix_b"], dtype=float)
    if mix_W.shape[1] != flat.shape[1]:
        raise EmbeddingError(
            f"mix matrix expects {mix_W.shape[1]} features, got {flat.shape[1]}"
        )
    return flat @ mix_W.T + mix_b


def embed_local_input_grad(spec: EmbedderSpec, m: DiagramMatrix):
    """Gradient of sum(embed_local over unmasked rows) w.r.t. the input matrix."""
    points = m.data.reshape(m.rows, m.k, 2)
    _, grads = _local_features(spec, points)  # (rows, k, atoms, 2)
    mix_W = np.asarray(spec.params["mix_W"], dtype=float)
    w = mix_W.sum(axis=0).reshape(m.k, -1)  # (k, atoms)
    grad = np.einsum("rkat,ka->rkt", grads, w).reshape(m.rows, 2 * m.k)
    grad[~m.mask] = 0.0
    return grad


def _mlp_forward(layers, x):
    """tanh MLP; returns activations list [(pre, post), ...] plus output."""
    trace = []
    h = x
    for W, bias in layers:
        W = np.asarray(W, dtype=float)
        bias = np.asarray(bias, dtype=float)
        pre = h @ W.T + bias
        post = np.tanh(pre)
        trace.append((h, post))
        h = post
    return h, trace


def _mlp_backward(layers, trace, grad_out):
    """Backpropagate grad_out through the tanh MLP; returns grad of the input."""
    g = grad_out
    for (W, _), (inp, post) in zip(reversed(layers), reversed(trace)):
        W = np.asarray(W, dtype=float)
        g = (g * (1.0 - post ** 2)) @ W
    return g


def _canonical_order(data):
    """A row order determined only by row contents, not input order."""
    keys = [tuple(row) for row in data]
    return sorted(range(len(keys)), key=lambda i: keys[i])


def embed_deepsets(spec: EmbedderSpec, m: DiagramMatrix):
    """DeepSets forward pass: per-row phi, sum-pool, rho, concat, affine.

    The pooled sum runs in a canonical content-based row order, so permuting
    rows leaves the context bit-identical. Returns (outputs, context).
    """
    if spec.kind != "deepsets":
        raise EmbeddingError("spec is not a deepsets embedder")
    phi_layers = spec.params["phi"]
    rho_layers = spec.params["rho"]
    final_W, final_b = spec.params["final"]
    final_W = np.asarray(final_W, dtype=float)
    final_b = np.asarray(final_b, dtype=float)

    phi_out, _ = _mlp_forward(phi_layers, m.data)
    hidden = phi_out.shape[1]
    pooled = np.zeros(hidden)
    order = _canonical_order(m.data)
    for i in order:
        if m.mask[i]:
            pooled = pooled + phi_out[i]
    context, _ = _mlp_forward(rho_layers, pooled)
    combined = np.concatenate(
        [phi_out, np.broadcast_to(context, (m.rows, context.shape[0]))], axis=1
    )
    outputs = combined @ final_W.T + final_b
    return outputs, context


def embed_deepsets_input_grad(spec: EmbedderSpec, m: DiagramMatrix):
    """Gradient of sum(outputs over unmasked rows) w.r.t. the input matrix."""
    phi_layers = spec.params["phi"]
    rho_layers = spec.params["rho"]
    final_W = np.asarray(spec.params["final"][0], dtype=float)

    phi_out, phi_trace = _mlp_forward(phi_layers, m.data)
    hidden = phi_out.shape[1]
    pooled = phi_out[m.mask].sum(axis=0) if m.mask.any() else np.zeros(hidden)
    _, rho_trace = _mlp_forward(rho_layers, pooled)

    n_unmasked = int(m.mask.sum())
    w_sum = final_W.sum(axis=0)  # gradient of summed outputs w.r.t. combined row
    g_phi_direct = np.where(m.mask[:, None], w_sum[:hidden], 0.0)
    # Context part: every unmasked row's output sees the same context.
    g_context = n_unmasked * w_sum[hidden:]
    g_pooled = _mlp_backward(rho_layers, rho_trace, g_context)
    # The pool sums phi over unmasked rows, so each unmasked row also gets
    # g_pooled through phi.
    g_phi = g_phi_direct + np.where(m.mask[:, None], g_pooled, 0.0)
    grad = _mlp_backward(phi_layers, phi_trace, g_phi)
    grad[~m.mask] = 0.0
    return grad


def embed(spec: EmbedderSpec, m: DiagramMatrix):
    """Dispatch to the local or DeepSets forward pass; returns row embeddings."""
    if spec.kind == "deepsets":
        return embed_deepsets(spec, m)[0]
    return embed_local(spec, m)


def embed_input_grad(spec: EmbedderSpec, m: DiagramMatrix):
    if spec.kind == "deepsets":
        return embed_deepsets_input_grad(spec, m)
    return embed_local_input_grad(spec, m)


def aggregate_dim0(x, psi0):
    """Residual update of vertex attributes: x + psi0, elementwise."""
    x = np.asarray(x, dtype=float)
    psi0 = np.asarray(psi0, dtype=float)
    if x.shape != psi0.shape:
        raise EmbeddingError(
            f"attribute shape {x.shape} does not match embedding shape {psi0.shape}"
        )
    return x + psi0


def pool_dim1(psi1, mask, mode="sum"):
    """Masked sum or mean over per-edge embeddings; empty mask gives zeros."""
    psi1 = np.asarray(psi1, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if mode not in ("sum", "mean"):
        raise EmbeddingError(f"unknown pooling mode {mode!r}")
    selected = psi1[mask]
    if selected.shape[0] == 0:
        return np.zeros(psi1.shape[1])
    total = selected.sum(axis=0)
    if mode == "mean":
        total = total / selected.shape[0]
    return total
