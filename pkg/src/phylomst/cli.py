"""Command-line interface.

``phylomst infer`` runs the spanning-tree inference on a FASTA file (plus
optional locations and geo graph); ``phylomst simulate`` generates
ground-truth instances in the same formats.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import GeoError, ModelError, ParseError
from .io_formats import write_fasta, write_locations
from .pipeline import RunConfig, build_site_model, run_pipeline
from .synth import simulate, write_truth

EXIT_PARSE = 1
EXIT_MODEL = 2
EXIT_GEO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phylomst",
        description="MST-based ancestral maximum-likelihood / phylogeography inference",
    )
    parser.add_argument("--version", action="version", version=f"phylomst {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    infer = sub.add_parser("infer", help="infer a tree from sequences (and locations)")
    infer.add_argument("--fasta", type=Path, required=True, help="input sequences")
    infer.add_argument(
        "--model",
        default="jc69",
        help="site model: binary, jc69, or gtr:FILE (default: jc69)",
    )
    infer.add_argument("--mu", type=float, default=1.0, help="substitution rate (default: 1.0)")
    infer.add_argument("--locations", type=Path, help="TSV sample_id<TAB>node")
    infer.add_argument("--geo-graph", type=Path, help="TSV u<TAB>v<TAB>weight")
    infer.add_argument(
        "--mode",
        choices=["independent", "shared-t"],
        default="independent",
        help="edge-cost mode (default: independent)",
    )
    infer.add_argument(
        "--eps",
        type=float,
        default=0.1,
        help="approximation slack for geo edge costs; eps3 = eps/8 (default: 0.1)",
    )
    infer.add_argument("--root", help="root sample id (default: smallest id)")
    infer.add_argument("--out-newick", type=Path, help="write the tree in Newick format")
    infer.add_argument("--out-edges", type=Path, help="write the edge table (TSV)")
    infer.add_argument("--out-report", type=Path, help="write the JSON run report")
    infer.add_argument("--out-figures", type=Path, help="directory for rendered figures")
    infer.add_argument("--seed", type=int, default=0, help="recorded in the report")

    sim = sub.add_parser("simulate", help="generate a ground-truth instance")
    sim.add_argument("--k", type=int, required=True, help="number of leaves")
    sim.add_argument("--n", type=int, required=True, help="sequence length")
    sim.add_argument("--model", default="jc69", help="binary, jc69, or gtr:FILE")
    sim.add_argument("--mu", type=float, default=1.0)
    sim.add_argument("--geo-graph", type=Path, help="evolve locations on this graph")
    sim.add_argument("--duration-min", type=float, default=0.1)
    sim.add_argument("--duration-max", type=float, default=1.0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out-fasta", type=Path, required=True)
    sim.add_argument("--out-locations", type=Path, help="required with --geo-graph")
    sim.add_argument("--out-truth", type=Path, help="write truth JSON")
    return parser


def _run_infer(args: argparse.Namespace) -> int:
    config = RunConfig(
        fasta=args.fasta,
        model=args.model,
        mu=args.mu,
        locations=args.locations,
        geo_graph=args.geo_graph,
        mode=args.mode.replace("-", "_"),
        eps=args.eps,
        root=args.root,
        out_newick=args.out_newick,
        out_edges=args.out_edges,
        out_report=args.out_report,
        out_figures=args.out_figures,
        seed=args.seed,
    )
    report = run_pipeline(config)
    print(
        f"k={report['k']} n={report['n']} root={report['root']} "
        f"cost={report['tree_cost_directed']:.6f} nats"
    )
    return 0


def _run_simulate(args: argparse.Namespace) -> int:
    from .io_formats import parse_geo_graph

    model = build_site_model(args.model, args.mu)
    geo = parse_geo_graph(args.geo_graph) if args.geo_graph else None
    if geo is not None and args.out_locations is None:
        raise ParseError("--out-locations is required with --geo-graph")
    tree, samples = simulate(
        k=args.k,
        n=args.n,
        model=model,
        geo=geo,
        duration_range=(args.duration_min, args.duration_max),
        seed=args.seed,
    )
    write_fasta(samples, args.out_fasta)
    if geo is not None:
        write_locations(samples, args.out_locations)
    if args.out_truth is not None:
        write_truth(tree, args.out_truth)
    print(f"simulated k={args.k} n={args.n} seed={args.seed} -> {args.out_fasta}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "infer":
            return _run_infer(args)
        return _run_simulate(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except GeoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEO


if __name__ == "__main__":
    sys.exit(main())
