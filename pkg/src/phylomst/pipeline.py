"""Batch front door: validate a run configuration, build the cost matrix,
run the spanning-tree inference, and serialize the outputs."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .cost_oracle import CostOracle, GeoCostModel, Sample, build_cost_matrix
from .errors import ModelError, ParseError
from .io_formats import (
    edges_tsv,
    newick_string,
    parse_fasta,
    parse_geo_graph,
    parse_gtr_file,
    parse_locations,
)
from .steiner_mst import (
    kruskal_mst,
    root_tree,
    tree_cost_directed,
    tree_cost_symmetric,
    tree_total_weight,
)
from .substitution import GTR, JC69, BinarySymmetric, SiteModel


@dataclass
class RunConfig:
    fasta: Path
    model: str = "jc69"  # "binary" | "jc69" | "gtr:FILE"
    mu: float = 1.0
    locations: Path | None = None
    geo_graph: Path | None = None
    mode: str = "independent"  # "independent" | "shared_t"
    eps: float = 0.1
    root: str | None = None
    out_newick: Path | None = None
    out_edges: Path | None = None
    out_report: Path | None = None
    out_figures: Path | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ModelError(f"eps must be in (0, 1), got {self.eps}")
        if self.mode not in ("independent", "shared_t"):
            raise ModelError(f"unknown mode {self.mode!r}")
        if (self.locations is None) != (self.geo_graph is None):
            raise ParseError("--locations and --geo-graph must be given together")


def build_site_model(spec: str, mu: float) -> SiteModel:
    if spec == "jc69":
        return JC69(mu=mu)
    if spec == "binary":
        return BinarySymmetric(mu=mu)
    if spec.startswith("gtr:"):
        return parse_gtr_file(spec[len("gtr:"):])
    raise ModelError(f"unknown model {spec!r} (expected binary, jc69, or gtr:FILE)")


def load_samples(config: RunConfig, model: SiteModel) -> list[Sample]:
    samples = parse_fasta(config.fasta, alphabet=model.alphabet)
    if config.locations is None:
        return samples
    mapping = parse_locations(config.locations)
    missing = [s.id for s in samples if s.id not in mapping]
    if missing:
        raise ParseError(f"locations file misses samples: {missing}")
    return [Sample(id=s.id, sequence=s.sequence, location=mapping[s.id]) for s in samples]


def run_pipeline(config: RunConfig) -> dict:
    """Run the full inference and write the requested outputs; returns the
    report dictionary.  All costs are natural-log (nats)."""
    started = time.perf_counter()
    model = build_site_model(config.model, config.mu)
    samples = load_samples(config, model)

    geo = None
    eps3 = None
    if config.geo_graph is not None:
        graph = parse_geo_graph(config.geo_graph)
        bad = sorted({s.location for s in samples if not 0 <= s.location < graph.num_nodes})
        if bad:
            raise ParseError(f"locations reference unknown graph nodes: {bad}")
        eps3 = config.eps / 8.0
        geo = GeoCostModel(graph, eps3=eps3)

    oracle = CostOracle(model, geo=geo, mode=config.mode)
    costs = build_cost_matrix(samples, oracle)
    mst_edges = kruskal_mst(costs)
    tree = root_tree(costs.ids, mst_edges, root=config.root)

    report = {
        "k": len(samples),
        "n": len(samples[0].sequence),
        "model": config.model,
        "mode": config.mode,
        "root": tree.root,
        "total_w": tree_total_weight(tree, costs),
        "tree_cost_directed": tree_cost_directed(tree, costs),
        "tree_cost_symmetric": tree_cost_symmetric(tree, costs),
        "eps": {"eps": config.eps, "eps3": eps3} if geo is not None else None,
        "cost_units": "nats",
        "seed": config.seed,
        "version": __version__,
        "wall_time_s": None,  # filled just before serialization
    }

    if config.out_newick is not None:
        Path(config.out_newick).write_text(newick_string(tree) + "\n")
    if config.out_edges is not None:
        Path(config.out_edges).write_text(edges_tsv(tree, costs))
    if config.out_figures is not None:
        from .plotting import save_figures

        save_figures(tree, costs, config.out_figures)

    report["wall_time_s"] = round(time.perf_counter() - started, 6)
    if config.out_report is not None:
        Path(config.out_report).write_text(
            json.dumps(report, indent=2, sort_keys=True, default=_json_safe) + "\n"
        )
    return report


def _json_safe(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    raise TypeError(f"not JSON serializable: {x!r}")
