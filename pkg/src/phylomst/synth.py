"""Ground-truth instance generator: random rooted binary trees, sequences
evolved site-wise along branches, and locations evolved by discrete walk
steps.

All randomness flows from a counter-based Philox generator keyed by the
64-bit seed, so identical seeds give byte-identical instances and
distinct seeds are safe to draw in parallel.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cost_oracle import Sample
from .errors import ModelError
from .geo_rw import GeoGraph, rw_stationary
from .substitution import SiteModel


@dataclass
class TruthNode:
    name: str
    parent: str | None
    duration: float  # branch length to parent; 0 at the root
    sequence: str
    location: int | None


@dataclass
class TruthTree:
    root: str
    nodes: dict[str, TruthNode]

    def leaf_names(self) -> list[str]:
        parents = {n.parent for n in self.nodes.values() if n.parent is not None}
        return sorted(name for name in self.nodes if name not in parents)

    def edges(self) -> list[tuple[str, str, float]]:
        return [
            (n.parent, n.name, n.duration)
            for n in self.nodes.values()
            if n.parent is not None
        ]


def simulate(
    k: int,
    n: int,
    model: SiteModel,
    geo: GeoGraph | None = None,
    duration_range: tuple[float, float] = (0.1, 1.0),
    seed: int = 0,
) -> tuple[TruthTree, list[Sample]]:
    """Draw a random binary topology on ``k`` leaves, evolve a stationary
    root label down every branch, and return the truth tree plus the leaf
    samples."""
    if k < 2:
        raise ModelError(f"need k >= 2 leaves, got {k}")
    if n < 1:
        raise ModelError(f"need sequence length n >= 1, got {n}")
    lo, hi = duration_range
    if not (0 <= lo <= hi and math.isfinite(hi)):
        raise ModelError(f"invalid duration range {duration_range}")

    rng = np.random.Generator(np.random.Philox(seed))
    width = len(str(k - 1))
    leaves = [f"s{i:0{width}d}" for i in range(k)]

    # coalescent-style random merging
    active = list(leaves)
    parent: dict[str, str] = {}
    duration: dict[str, float] = {}
    counter = 0
    while len(active) > 1:
        i, j = sorted(rng.choice(len(active), size=2, replace=False))
        a, b = active[i], active[j]
        name = f"a{counter:03d}"
        counter += 1
        for child in (a, b):
            parent[child] = name
            duration[child] = float(rng.uniform(lo, hi)) if hi > 0 else 0.0
        active = [x for x in active if x not in (a, b)] + [name]
    root = active[0]

    children: dict[str, list[str]] = {}
    for child, par in parent.items():
        children.setdefault(par, []).append(child)
    for par in children:
        children[par].sort()

    pi = model.stationary()
    m = model.size
    seq_idx: dict[str, np.ndarray] = {root: rng.choice(m, size=n, p=pi)}
    loc: dict[str, int | None] = {root: None}
    walk = None
    if geo is not None:
        walk = geo.transition()
        loc[root] = int(rng.choice(geo.num_nodes, p=rw_stationary(geo)))

    order = [root]
    stack = [root]
    while stack:
        u = stack.pop()
        for c in children.get(u, []):
            order.append(c)
            stack.append(c)

    for name in order[1:]:
        par = parent[name]
        t = duration[name]
        seq_idx[name] = _evolve_sites(rng, model, seq_idx[par], t)
        if geo is not None:
            cur = loc[par]
            for _ in range(math.ceil(t)):
                cur = int(rng.choice(geo.num_nodes, p=walk[cur]))
            loc[name] = cur
        else:
            loc[name] = None

    alphabet = model.alphabet
    nodes = {
        name: TruthNode(
            name=name,
            parent=parent.get(name),
            duration=duration.get(name, 0.0),
            sequence="".join(alphabet[i] for i in seq_idx[name]),
            location=loc[name],
        )
        for name in order
    }
    tree = TruthTree(root=root, nodes=nodes)
    samples = [
        Sample(id=name, sequence=nodes[name].sequence, location=nodes[name].location)
        for name in sorted(leaves)
    ]
    return tree, samples


def _evolve_sites(
    rng: np.random.Generator, model: SiteModel, parent_idx: np.ndarray, t: float
) -> np.ndarray:
    P = model.transition_matrix(t)
    child = np.empty_like(parent_idx)
    for a in range(model.size):
        sites = np.nonzero(parent_idx == a)[0]
        if sites.size:
            child[sites] = rng.choice(model.size, size=sites.size, p=P[a])
    return child


def write_truth(tree: TruthTree, path: str | Path) -> None:
    """Serialize topology, durations, and full node labels as JSON."""
    payload = {
        "root": tree.root,
        "nodes": {
            name: {
                "parent": node.parent,
                "duration": node.duration,
                "sequence": node.sequence,
                "location": node.location,
            }
            for name, node in sorted(tree.nodes.items())
        },
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
