"""Topological machinery for graph learning: filtrations, fast graph
persistence with gradient routing, clique-complex persistence, WL
refinement, diagram embeddings, and synthetic benchmark generators."""

__version__ = "0.1.0"

from .graphs import Graph, BettiPair, betti_graph, parse_edge_list, parse_graph6
from .filtration import VertexFiltration, FiltrationFamily, FiltrationMLP, degree_filtration
from .persistence import DiagramPair, PersistencePair, ph_graph, diagrams_equal
from .simplicial import SimplicialComplex, GeneralDiagram, clique_complex, reduce_persistence
from .wl import wl_refine, wl_distinguish, wl_filtration
from .embedding import DiagramMatrix, EmbedderSpec, build_matrix, embed
from .grad import RoutingMap, build_routing, backward, finite_diff_check
