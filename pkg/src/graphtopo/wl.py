"""Weisfeiler-Lehman color refinement and the WL-derived filtration.

Refinement hashes every (label, sorted neighbor-label multiset) pair to a
dense integer through a shared insertion-ordered table, so labels are
comparable across all graphs refined in the same session. Divergence of the
per-iteration label histograms distinguishes graphs; the label indices also
yield a vertex filtration that transfers any WL distinction to persistence
diagrams.
"""

import csv
import io
from collections import Counter
from dataclasses import dataclass

from .graphs import Graph
from .filtration import VertexFiltration, make_injective


class LabelTable:
    """Insertion-ordered perfect hash: signature -> dense integer label."""

    def __init__(self):
        self._table = {}

    def get(self, signature):
        label = self._table.get(signature)
        if label is None:
            label = len(self._table)
            self._table[signature] = label
        return label

    def __len__(self):
        return len(self._table)


@dataclass(frozen=True)
class WLColoring:
    """Per-iteration vertex labels and label-count histograms for one graph."""

    iterations: tuple  # of tuples of int labels
    histograms: tuple  # of Counter

    def labels_at(self, h):
        return self.iterations[h]

    def histogram_at(self, h):
        return self.histograms[h]


def _initial_labels(g: Graph, init: str, table: LabelTable):
    if init == "uniform":
        label = table.get(("init",))
        return tuple(label for _ in range(g.n_vertices))
    if init == "degree":
        degrees = g.degrees()
        return tuple(table.get(("deg", d)) for d in degrees)
    raise ValueError(f"unknown init {init!r} (expected 'uniform' or 'degree')")


def wl_refine(graphs, h: int, init: str = "uniform", table: LabelTable = None):
    """Refine all graphs for h iterations over a shared label table.

    Returns one WLColoring per input graph; iteration 0 holds the initial
    labels. Sharing the table makes histograms comparable across graphs.
    """
    if h < 0:
        raise ValueError("iteration count must be nonnegative")
    if table is None:
        table = LabelTable()
    adjacencies = [g.adjacency() for g in graphs]
    currents = [_initial_labels(g, init, table) for g in graphs]
    per_graph = [[labels] for labels in currents]
    for _ in range(h):
        # One full pass over all graphs per iteration keeps label ids
        # comparable regardless of how many graphs are refined together.
        nxt = []
        for adj, labels in zip(adjacencies, currents):
            new = tuple(
                table.get((labels[v], tuple(sorted(labels[w] for w in adj[v]))))
                for v in range(len(labels))
            )
            nxt.append(new)
        currents = nxt
        for record, labels in zip(per_graph, currents):
            record.append(labels)
    return [
        WLColoring(
            tuple(iters),
            tuple(Counter(labels) for labels in iters),
        )
        for iters in per_graph
    ]


def wl_distinguish(g: Graph, g2: Graph, max_iter: int, init: str = "uniform"):
    """Smallest iteration where the label histograms of g and g2 differ.

    Returns None if they never diverge up to max_iter, stopping early once
    both colorings stabilize (refinement stops producing finer partitions).
    """
    table = LabelTable()
    colorings = wl_refine([g, g2], 0, init=init, table=table)
    prev = [c.iterations[0] for c in colorings]
    if Counter(prev[0]) != Counter(prev[1]):
        return 0
    labels = prev
    adjacencies = [g.adjacency(), g2.adjacency()]
    for t in range(1, max_iter + 1):
        nxt = []
        for adj, lab in zip(adjacencies, labels):
            nxt.append(
                tuple(
                    table.get((lab[v], tuple(sorted(lab[w] for w in adj[v]))))
                    for v in range(len(lab))
                )
            )
        if Counter(nxt[0]) != Counter(nxt[1]):
            return t
        stabilized = all(
            len(set(new)) == len(set(old)) for new, old in zip(nxt, labels)
        )
        labels = nxt
        if stabilized:
            return None
    return None


def wl_filtration(g: Graph, g2: Graph, h: int, epsilon: float = 1e-3):
    """Filtrations from iteration-h WL labels, made injective per graph.

    Labels present at iteration h across both graphs are enumerated in
    first-seen (table insertion) order; f(v) is the 1-based index of the
    label of v. Each filtration is then perturbed into injectivity within
    sup-distance epsilon.
    """
    colorings = wl_refine([g, g2], h)
    labels_g = colorings[0].labels_at(h)
    labels_g2 = colorings[1].labels_at(h)
    # Table labels are dense integers assigned in first-seen order, so
    # ascending label id is exactly first-seen enumeration.
    enumeration = {
        label: idx + 1
        for idx, label in enumerate(sorted(set(labels_g) | set(labels_g2)))
    }
    filtrations = []
    for graph, labels in ((g, labels_g), (g2, labels_g2)):
        f = VertexFiltration(
            tuple(float(enumeration[l]) for l in labels), graph.n_vertices
        )
        filtrations.append(make_injective(f, epsilon))
    return tuple(filtrations)


def coloring_to_csv(coloring: WLColoring) -> str:
    """Export a coloring as CSV rows (iteration, vertex, label)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["iteration", "vertex", "label"])
    for t, labels in enumerate(coloring.iterations):
        for v, label in enumerate(labels):
            writer.writerow([t, v, label])
    return buf.getvalue()
