"""HTTP service exposing the library operations.

Thin FastAPI wrapper: pydantic models validate the wire format, the core
package does the work. Graphs travel as {n_vertices, edges}; diagrams use
the same JSON schema as the CLI ("inf" for infinite deaths, dummy slots
flagged).
"""

import json
from typing import List, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .graphs import Graph, GraphError, betti_graph, parse_graph6
from .filtration import (
    FiltrationError,
    VertexFiltration,
    degree_filtration,
    make_injective,
)
from .persistence import ph_graph, diagram_to_json, diagrams_equal
from .simplicial import ComplexError, SimplicialComplex, betti_numbers
from .wl import wl_distinguish, wl_filtration
from .embedding import EmbedderSpec, EmbeddingError, random_spec
from .grad import GradError, finite_diff_check
from . import synth

app = FastAPI(title="graphtopo", version=__version__)

_CORE_ERRORS = (GraphError, FiltrationError, ComplexError, EmbeddingError,
                GradError, synth.SynthError, ValueError)


class GraphModel(BaseModel):
    n_vertices: int
    edges: List[List[int]] = Field(default_factory=list)
    attributes: Optional[List[List[float]]] = None

    def to_graph(self) -> Graph:
        return Graph(
            self.n_vertices,
            tuple(tuple(e) for e in self.edges),
            tuple(tuple(row) for row in self.attributes) if self.attributes else None,
        )


class PHRequest(BaseModel):
    graph: GraphModel
    filtration_values: Optional[List[float]] = None  # default: degree filtration


class PHResponse(BaseModel):
    dim0: List[dict]
    dim1: List[dict]
    max_filtration: float


class BettiResponse(BaseModel):
    b0: int
    b1: int


class ComplexRequest(BaseModel):
    simplices: List[dict]  # {"simplex": [...], "value": float}
    up_to: int = 2


class ComplexBettiResponse(BaseModel):
    betti: List[int]


class WLRequest(BaseModel):
    graph_a: GraphModel
    graph_b: GraphModel
    max_iter: int = 10
    epsilon: float = 1e-3
    compare_diagrams: bool = True


class WLResponse(BaseModel):
    divergence_iteration: Optional[int]
    wl_distinguishes: bool
    betti_a: List[int]
    betti_b: List[int]
    ph_diagrams_equal: Optional[bool] = None


class GradCheckRequest(BaseModel):
    graph: GraphModel
    filtration_values: Optional[List[float]] = None
    make_injective_epsilon: Optional[float] = None
    embedder_kind: str = "gaussian"
    embedder_seed: int = 0
    step: float = 1e-5


class GradCheckResponse(BaseModel):
    max_relative_error: float


class GenerateRequest(BaseModel):
    dataset: str  # cycles | necklaces
    count: int = 100
    seed: int = 0


class GenerateResponse(BaseModel):
    samples: List[dict]


class Graph6Request(BaseModel):
    graph6: str


def _filtration(g: Graph, values):
    if values is None:
        return degree_filtration(g)
    if len(values) != g.n_vertices:
        raise HTTPException(422, "filtration_values length does not match graph")
    return VertexFiltration(tuple(values), g.n_vertices)


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/ph", response_model=PHResponse)
def compute_ph(req: PHRequest):
    try:
        g = req.graph.to_graph()
        f = _filtration(g, req.filtration_values)
        d = ph_graph(g, f)
        return json.loads(diagram_to_json(d))
    except _CORE_ERRORS as exc:
        raise HTTPException(422, str(exc))


@app.post("/betti", response_model=BettiResponse)
def compute_betti(req: GraphModel):
    try:
        pair = betti_graph(req.to_graph())
        return {"b0": pair.b0, "b1": pair.b1}
    except _CORE_ERRORS as exc:
        raise HTTPException(422, str(exc))


@app.post("/complex/betti", response_model=ComplexBettiResponse)
def compute_complex_betti(req: ComplexRequest):
    try:
        k = SimplicialComplex(
            tuple((tuple(it["simplex"]), it["value"]) for it in req.simplices)
        )
        return {"betti": list(betti_numbers(k, req.up_to))}
    except _CORE_ERRORS + (KeyError,) as exc:
        raise HTTPException(422, str(exc))


@app.post("/wl/compare", response_model=WLResponse)
def compare_wl(req: WLRequest):
    try:
        ga, gb = req.graph_a.to_graph(), req.graph_b.to_graph()
        divergence = wl_distinguish(ga, gb, req.max_iter)
        pa, pb = betti_graph(ga), betti_graph(gb)
        result = {
            "divergence_iteration": divergence,
            "wl_distinguishes": divergence is not None,
            "betti_a": [pa.b0, pa.b1],
            "betti_b": [pb.b0, pb.b1],
        }
        if req.compare_diagrams:
            h = divergence if divergence is not None else req.max_iter
            fa, fb = wl_filtration(ga, gb, h, req.epsilon)
            result["ph_diagrams_equal"] = diagrams_equal(
                ph_graph(ga, fa), ph_graph(gb, fb)
            )
        return result
    except _CORE_ERRORS as exc:
        raise HTTPException(422, str(exc))


@app.post("/gradcheck", response_model=GradCheckResponse)
def gradcheck(req: GradCheckRequest):
    try:
        g = req.graph.to_graph()
        f = _filtration(g, req.filtration_values)
        if req.make_injective_epsilon is not None:
            f = make_injective(f, req.make_injective_epsilon)
        spec = random_spec(req.embedder_kind, k=1, output_dim=3,
                           seed=req.embedder_seed)
        return {"max_relative_error": finite_diff_check(g, f, spec, req.step)}
    except _CORE_ERRORS as exc:
        raise HTTPException(422, str(exc))


@app.post("/datasets/generate", response_model=GenerateResponse)
def generate(req: GenerateRequest):
    try:
        if req.dataset == "cycles":
            samples = synth.gen_cycles(req.count, req.seed)
        elif req.dataset == "necklaces":
            samples = synth.gen_necklaces(req.count, req.seed)
        else:
            raise HTTPException(422, f"unknown dataset {req.dataset!r}")
        return {
            "samples": [
                {
                    "n_vertices": s.graph.n_vertices,
                    "edges": [list(e) for e in s.graph.edges],
                    "label": s.label,
                    "seed": s.seed,
                }
                for s in samples
            ]
        }
    except _CORE_ERRORS as exc:
        raise HTTPException(422, str(exc))


@app.post("/graph6/decode", response_model=GraphModel)
def decode_graph6(req: Graph6Request):
    try:
        g = parse_graph6(req.graph6)
        return {"n_vertices": g.n_vertices, "edges": [list(e) for e in g.edges]}
    except _CORE_ERRORS as exc:
        raise HTTPException(422, str(exc))
