"""Batch command-line front end.

Every command is deterministic given its config (including --seed), echoes
the config plus input hashes into its output, and uses exit codes
0 (success), 1 (internal invariant violation), 2 (input/config error).
"""

import concurrent.futures
import hashlib
import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from .graphs import (
    Graph,
    GraphError,
    ParseError,
    betti_graph,
    parse_edge_list,
    parse_graph6_file,
)
from .filtration import (
    FiltrationError,
    FiltrationMLP,
    VertexFiltration,
    apply_mlp,
    degree_filtration,
    make_injective,
)
from .persistence import ph_graph, diagram_to_json, diagrams_equal, diagram_multiset
from .simplicial import (
    ComplexError,
    SimplicialComplex,
    betti_numbers,
    persistence_features,
    tetrahedron_boundary,
    torus_minimal,
)
from .wl import wl_distinguish, wl_filtration
from .embedding import EmbedderSpec, random_spec
from .grad import GradError, NonInjectiveError, finite_diff_check
from . import synth

INPUT_ERROR = 2
INTERNAL_ERROR = 1

_INPUT_EXCEPTIONS = (
    ParseError,
    GraphError,
    FiltrationError,
    ComplexError,
    NonInjectiveError,
    GradError,
    synth.SynthError,
    OSError,
    json.JSONDecodeError,
    ValueError,
)


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _metadata(command, config, inputs):
    return {
        "tool": "graphtopo",
        "version": __version__,
        "command": command,
        "config": config,
        "inputs": {str(p): _sha256(p) for p in inputs},
    }


def _load_graph(path):
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".g6":
        graphs = parse_graph6_file(text)
        if len(graphs) != 1:
            raise ParseError(f"{path}: expected exactly one graph6 line")
        return graphs[0]
    return parse_edge_list(text)


def _load_filtration(graph, filtration, values_path):
    if values_path is not None:
        f = VertexFiltration.from_json(Path(values_path).read_text())
        if f.graph_n != graph.n_vertices:
            raise FiltrationError("filtration values do not match graph size")
        return f
    if filtration == "degree":
        return degree_filtration(graph)
    raise FiltrationError(f"unknown filtration {filtration!r}")


def _emit(payload, out):
    text = json.dumps(payload, indent=2)
    if out is None:
        click.echo(text)
    else:
        Path(out).write_text(text + "\n")


def _threads(threads):
    if threads is not None:
        return threads
    env = os.environ.get("TOPO_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


@click.group()
@click.version_option(__version__)
def main():
    """Topological analysis of graphs: persistence, WL refinement, datasets."""


@main.command("ph")
@click.argument("graph_file", type=click.Path(exists=True))
@click.option("--filtration", default="degree", show_default=True,
              help="Built-in filtration name (currently: degree).")
@click.option("--filtration-values", type=click.Path(exists=True),
              help="JSON array of per-vertex values; overrides --filtration.")
@click.option("--mlp", "mlp_config", type=click.Path(exists=True),
              help="MLP config JSON; produces one diagram per output coordinate.")
@click.option("--include-dummies/--no-dummies", default=True, show_default=True)
@click.option("--plot", "plot_script", is_flag=True,
              help="Also emit a gnuplot script for the dim-0 diagram.")
@click.option("--out", type=click.Path(), help="Output path (default: stdout).")
def cmd_ph(graph_file, filtration, filtration_values, mlp_config,
           include_dummies, plot_script, out):
    """Persistence diagrams of a graph under a vertex filtration."""
    try:
        g = _load_graph(graph_file)
        inputs = [graph_file]
        if mlp_config is not None:
            inputs.append(mlp_config)
            mlp = FiltrationMLP.from_json(Path(mlp_config).read_text())
            family = apply_mlp(mlp, g)
            diagrams = [ph_graph(g, f) for f in family.per_filtration]
        else:
            if filtration_values is not None:
                inputs.append(filtration_values)
            f = _load_filtration(g, filtration, filtration_values)
            diagrams = [ph_graph(g, f)]
        config = {
            "filtration": filtration,
            "filtration_values": filtration_values,
            "mlp": mlp_config,
        }
        payload = {
            "metadata": _metadata("ph", config, inputs),
            "diagrams": [
                json.loads(diagram_to_json(d, include_dummies=include_dummies))
                for d in diagrams
            ],
        }
        if plot_script:
            payload["gnuplot"] = _gnuplot_script(diagrams[0])
        _emit(payload, out)
    except _INPUT_EXCEPTIONS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(INPUT_ERROR)


def _gnuplot_script(diagram):
    points = [
        (p.birth, diagram.max_filtration if p.death == float("inf") else p.death)
        for p in diagram.d0
    ]
    data = "\n".join(f"{b} {d}" for b, d in points)
    return (
        "set title 'Persistence diagram (dim 0)'\n"
        "set xlabel 'birth'\nset ylabel 'death'\n"
        "plot '-' with points pt 7, x with lines\n" + data + "\ne\n"
    )


@main.command("betti")
@click.argument("inputs", nargs=-1, type=click.Path(exists=True))
@click.option("--max-dim", default=1, show_default=True)
@click.option("--fixture", type=click.Choice(["sphere", "torus"]), multiple=True,
              help="Also report a built-in complex.")
@click.option("--out", type=click.Path(), help="Output CSV path (default: stdout).")
def cmd_betti(inputs, max_dim, fixture, out):
    """Betti numbers per input (complex JSON, .g6, or edge-list files)."""
    try:
        rows = []
        for path in inputs:
            path = Path(path)
            if path.suffix == ".json":
                k = SimplicialComplex.from_json(path.read_text())
                rows.append((str(path), betti_numbers(k, max_dim)))
            elif path.suffix == ".g6":
                graphs = parse_graph6_file(path.read_text())
                if not graphs:
                    raise ParseError(f"{path}: no graphs found")
                for i, g in enumerate(graphs):
                    pair = betti_graph(g)
                    rows.append((f"{path}:{i}", (pair.b0, pair.b1)))
            else:
                g = parse_edge_list(path.read_text())
                if g.n_vertices == 0:
                    raise ParseError(f"{path}: empty graph")
                pair = betti_graph(g)
                rows.append((str(path), (pair.b0, pair.b1)))
        for name in fixture:
            k = tetrahedron_boundary() if name == "sphere" else torus_minimal()
            rows.append((name, betti_numbers(k, max(max_dim, 2))))
        if not rows:
            raise click.UsageError("no inputs given")
        meta = _metadata("betti", {"max_dim": max_dim, "fixtures": list(fixture)},
                         inputs)
        header = "# " + json.dumps(meta)
        lines = [header, "input," + ",".join(f"b{d}" for d in range(max_dim + 1))]
        for name, betti in rows:
            padded = list(betti) + [0] * (max_dim + 1 - len(betti))
            lines.append(name + "," + ",".join(str(b) for b in padded[: max_dim + 1]))
        text = "\n".join(lines)
        if out is None:
            click.echo(text)
        else:
            Path(out).write_text(text + "\n")
    except click.UsageError:
        raise
    except _INPUT_EXCEPTIONS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(INPUT_ERROR)


@main.command("wl")
@click.argument("graph_a", type=click.Path(exists=True))
@click.argument("graph_b", type=click.Path(exists=True))
@click.option("--iters", default=10, show_default=True)
@click.option("--init", default="uniform", type=click.Choice(["uniform", "degree"]),
              show_default=True)
@click.option("--epsilon", default=1e-3, show_default=True)
@click.option("--diagrams/--no-diagrams", default=True, show_default=True,
              help="Also compare persistence diagrams under the WL filtration.")
@click.option("--out", type=click.Path())
def cmd_wl(graph_a, graph_b, iters, init, epsilon, diagrams, out):
    """WL divergence report for a pair of graphs, plus the PH comparison."""
    try:
        ga, gb = _load_graph(graph_a), _load_graph(graph_b)
        divergence = wl_distinguish(ga, gb, iters)
        pa, pb = betti_graph(ga), betti_graph(gb)
        report = {
            "metadata": _metadata(
                "wl",
                {"iters": iters, "init": init, "epsilon": epsilon},
                [graph_a, graph_b],
            ),
            "wl_divergence_iteration": divergence,
            "wl_distinguishes": divergence is not None,
            "betti": {"a": [pa.b0, pa.b1], "b": [pb.b0, pb.b1]},
        }
        if diagrams:
            h = divergence if divergence is not None else iters
            fa, fb = wl_filtration(ga, gb, h, epsilon)
            da, db = ph_graph(ga, fa), ph_graph(gb, fb)
            report["ph_diagrams_equal"] = diagrams_equal(da, db)
            report["ph_distinguishes"] = not diagrams_equal(da, db)
        _emit(report, out)
    except _INPUT_EXCEPTIONS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(INPUT_ERROR)


def _features_job(args):
    g6_line, max_dim, offset = args
    from .graphs import parse_graph6

    return persistence_features(parse_graph6(g6_line), max_dim, offset)


@main.command("regular")
@click.argument("graph6_file", type=click.Path(exists=True))
@click.option("--max-dim", default=4, show_default=True)
@click.option("--threads", type=int, default=None,
              help="Worker pool size (default: TOPO_THREADS or CPU count).")
@click.option("--out", type=click.Path())
def cmd_regular(graph6_file, max_dim, threads, out):
    """Pairwise distinguishability of a graph6 corpus by total persistence.

    Both essential-substitute conventions (max filtration value, and max
    value + 1) are reported.
    """
    try:
        lines = [
            ln.strip() for ln in Path(graph6_file).read_text().splitlines()
            if ln.strip()
        ]
        if not lines:
            raise ParseError(f"{graph6_file}: no graphs found")
        n_workers = _threads(threads)
        results = {}
        for offset in (0.0, 1.0):
            jobs = [(ln, max_dim, offset) for ln in lines]
            if n_workers > 1 and len(jobs) > 1:
                with concurrent.futures.ProcessPoolExecutor(n_workers) as pool:
                    feats = list(pool.map(_features_job, jobs))
            else:
                feats = [_features_job(j) for j in jobs]
            n = len(feats)
            pairs = n * (n - 1) // 2
            indistinct = 0
            for a in range(n):
                for b in range(a + 1, n):
                    if all(abs(x - y) <= 1e-9 for x, y in zip(feats[a], feats[b])):
                        indistinct += 1
            results[f"substitute_max_plus_{offset:g}"] = {
                "graphs": n,
                "pairs": pairs,
                "indistinguishable": indistinct,
                "error_rate": (indistinct / pairs) if pairs else 0.0,
            }
        payload = {
            "metadata": _metadata(
                "regular", {"max_dim": max_dim, "threads": n_workers}, [graph6_file]
            ),
            "results": results,
        }
        _emit(payload, out)
    except _INPUT_EXCEPTIONS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(INPUT_ERROR)


@main.command("gen")
@click.option("--dataset", type=click.Choice(["cycles", "necklaces"]), required=True)
@click.option("--count", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--format", "fmt", type=click.Choice(["dir", "jsonl"]), default="dir",
              show_default=True)
def cmd_gen(dataset, count, seed, out, fmt):
    """Generate a synthetic 2-class dataset."""
    try:
        if dataset == "cycles":
            samples = synth.gen_cycles(count, seed)
        else:
            samples = synth.gen_necklaces(count, seed)
        if fmt == "dir":
            synth.export_directory(samples, out)
            meta_path = Path(out) / "metadata.json"
            meta_path.write_text(
                json.dumps(
                    _metadata("gen", {"dataset": dataset, "count": count,
                                      "seed": seed}, [])
                )
                + "\n"
            )
        else:
            Path(out).write_text(synth.export_jsonl(samples))
        click.echo(f"wrote {count} samples to {out}")
    except _INPUT_EXCEPTIONS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(INPUT_ERROR)


@main.command("gradcheck")
@click.argument("graph_file", type=click.Path(exists=True))
@click.option("--filtration", default="degree", show_default=True)
@click.option("--filtration-values", type=click.Path(exists=True))
@click.option("--make-injective", "inject_eps", type=float, default=None,
              help="Perturb tied filtration values within this epsilon first.")
@click.option("--embedder-config", type=click.Path(exists=True))
@click.option("--embedder-kind", default="gaussian", show_default=True)
@click.option("--embedder-seed", default=0, show_default=True)
@click.option("--h", "step", default=1e-5, show_default=True)
@click.option("--out", type=click.Path())
def cmd_gradcheck(graph_file, filtration, filtration_values, inject_eps,
                  embedder_config, embedder_kind, embedder_seed, step, out):
    """Finite-difference verification of the diagram gradient routing."""
    try:
        g = _load_graph(graph_file)
        f = _load_filtration(g, filtration, filtration_values)
        if inject_eps is not None:
            f = make_injective(f, inject_eps)
        if embedder_config is not None:
            spec = EmbedderSpec.from_json(Path(embedder_config).read_text())
        else:
            spec = random_spec(embedder_kind, k=1, output_dim=3, seed=embedder_seed)
        err = finite_diff_check(g, f, spec, step)
        payload = {
            "metadata": _metadata(
                "gradcheck",
                {"filtration": filtration, "h": step, "embedder": embedder_kind,
                 "embedder_seed": embedder_seed},
                [graph_file],
            ),
            "max_relative_error": err,
        }
        _emit(payload, out)
    except _INPUT_EXCEPTIONS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(INPUT_ERROR)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def cmd_serve(host, port):
    """Run the HTTP service exposing the library operations."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
