"""Synthetic 2-class graph datasets with known topological structure.

Cycles: one large cycle (class 0) versus several small disjoint cycles
(class 1); the classes are separable from Betti numbers alone. Necklaces:
chains with two attached cycles that are either individual (class 0) or
merged through shared anchor vertices (class 1); both classes share b0 and
b1, so Betti counts alone cannot separate them.
"""

import csv
import io
import json
import random
from dataclasses import dataclass
from pathlib import Path

from .graphs import Graph, serialize_edge_list


class SynthError(Exception):
    pass


@dataclass(frozen=True)
class SynthSample:
    graph: Graph
    label: int
    dataset: str
    seed: int


def _attach_attributes(g: Graph, rng: random.Random):
    """1-dim attribute per vertex: scaled degree plus seeded noise.

    Artifact convention so MLP-filtration demos run; not part of the
    topological labels.
    """
    degrees = g.degrees()
    attrs = tuple((0.1 * d + 0.01 * rng.random(),) for d in degrees)
    return g.with_attributes(attrs)


def _cycle_edges(start: int, length: int):
    return [
        (start + i, start + (i + 1) % length) for i in range(length)
    ]


def gen_cycles(count: int, seed: int, size_range=(10, 20)):
    """Balanced dataset: one big cycle (label 0) vs several small ones (label 1)."""
    if count % 2 != 0:
        raise SynthError("count must be even for balanced classes")
    lo, hi = size_range
    if lo < 3:
        raise SynthError("cycles need at least 3 vertices")
    samples = []
    for idx in range(count):
        sample_seed = seed * 1_000_003 + idx
        rng = random.Random(sample_seed)
        label = idx % 2
        total = rng.randint(lo, hi)
        if label == 0:
            edges = _cycle_edges(0, total)
            g = Graph(total, tuple(edges))
        else:
            g = None
            for _ in range(100):
                q = rng.randint(2, 5)
                if total < 3 * q:
                    continue
                # Split total into q cycle sizes, each >= 3: draw q-1 sizes,
                # give the remainder to the last cycle.
                sizes = []
                remaining = total
                ok = True
                for i in range(q - 1):
                    max_size = remaining - 3 * (q - 1 - i)
                    if max_size < 3:
                        ok = False
                        break
                    sizes.append(rng.randint(3, max_size))
                    remaining -= sizes[-1]
                if not ok or remaining < 3:
                    continue
                sizes.append(remaining)
                edges = []
                start = 0
                for s in sizes:
                    edges.extend(_cycle_edges(start, s))
                    start += s
                g = Graph(total, tuple(edges))
                break
            if g is None:
                raise SynthError(
                    f"could not partition {total} vertices into small cycles"
                )
        g = _attach_attributes(g, rng)
        samples.append(SynthSample(g, label, "cycles", sample_seed))
    return samples


def gen_necklaces(count: int, seed: int, chain_range=(8, 16), cycle_size_range=(3, 5)):
    """Balanced dataset of chains with two cycles, individual vs merged.

    Class 0 attaches one cycle at each of two distinct interior anchors of
    the chain. Class 1 connects the same two anchors by two extra internal
    paths, merging the cycles through the shared anchors. Both classes have
    b0 = 1 and b1 = 2.
    """
    if count % 2 != 0:
        raise SynthError("count must be even for balanced classes")
    lo, hi = chain_range
    if lo < 4:
        raise SynthError("chain must have at least 4 vertices for two interior anchors")
    samples = []
    for idx in range(count):
        sample_seed = seed * 1_000_003 + idx
        rng = random.Random(sample_seed)
        label = idx % 2
        chain_len = rng.randint(lo, hi)
        edges = [(i, i + 1) for i in range(chain_len - 1)]
        anchors = sorted(rng.sample(range(1, chain_len - 1), 2))
        next_vertex = chain_len
        if label == 0:
            for anchor in anchors:
                size = rng.randint(*cycle_size_range)
                ring = [anchor] + list(range(next_vertex, next_vertex + size - 1))
                next_vertex += size - 1
                for i in range(len(ring)):
                    edges.append((ring[i], ring[(i + 1) % len(ring)]))
        else:
            a1, a2 = anchors
            for _ in range(2):
                # Internal path of >= 2 new vertices between the two anchors.
                length = rng.randint(2, max(2, cycle_size_range[1] - 1))
                path = list(range(next_vertex, next_vertex + length))
                next_vertex += length
                edges.append((a1, path[0]))
                for i in range(length - 1):
                    edges.append((path[i], path[i + 1]))
                edges.append((path[-1], a2))
        g = Graph(next_vertex, tuple(edges))
        g = _attach_attributes(g, rng)
        samples.append(SynthSample(g, label, "necklaces", sample_seed))
    return samples


def export_directory(samples, out_dir):
    """Write one edge-list file per sample plus a labels CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, s in enumerate(samples):
        name = f"{s.dataset}_{i:05d}.edges"
        (out / name).write_text(serialize_edge_list(s.graph))
        rows.append((i, s.label, name, s.seed))
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["id", "label", "file", "seed"])
    writer.writerows(rows)
    (out / "labels.csv").write_text(buf.getvalue())


def export_jsonl(samples) -> str:
    """One JSON object per line: edges, label, dataset, seed."""
    lines = []
    for i, s in enumerate(samples):
        lines.append(
            json.dumps(
                {
                    "id": i,
                    "n_vertices": s.graph.n_vertices,
                    "edges": [list(e) for e in s.graph.edges],
                    "label": s.label,
                    "dataset": s.dataset,
                    "seed": s.seed,
                }
            )
        )
    return "\n".join(lines) + "\n"
