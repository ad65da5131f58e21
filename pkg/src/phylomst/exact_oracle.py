"""Desk-scale ground truth: brute-force duration suprema, exact optimal
Steiner-tree cost over the full labeled state space, and brute-force walk
suprema.

Exactness of the Steiner cost rests on two facts: every Steiner tree
spans some superset X of the terminals, and every spanning tree of X is a
feasible Steiner tree, so OPT = min over supersets of MST(X, w') plus the
node costs of X.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .cost_oracle import CostMatrix, CostOracle, Sample, build_cost_matrix
from .errors import ModelError
from .geo_rw import GeoGraph
from .optimize import grid_sup_t  # re-exported oracle utility

__all__ = [
    "StateSpace",
    "enumerate_states",
    "exact_steiner_cost",
    "brute_force_sup_rw",
    "brute_force_sup_rw_matrix",
    "grid_sup_t",
]

_MAX_STATES = 64
_MAX_TERMINALS = 6
_MAX_FREE = 16


@dataclass
class StateSpace:
    """Every labeled state (sequence, optional location) with its costs."""

    samples: list[Sample]
    costs: CostMatrix

    def __len__(self) -> int:
        return len(self.samples)

    def state_id(self, sequence: str, location: int | None = None) -> str:
        return _state_id(sequence, location)


def _state_id(sequence: str, location: int | None) -> str:
    return sequence if location is None else f"{sequence}@{location}"


def enumerate_states(oracle: CostOracle, n: int) -> StateSpace:
    """All sequences of length ``n`` over the oracle's alphabet, crossed
    with every graph node when the oracle carries a geo model."""
    alphabet = oracle.site_model.alphabet
    locations: list[int | None] = [None]
    if oracle.geo is not None:
        locations = list(range(oracle.geo.graph.num_nodes))
    total = len(alphabet) ** n * len(locations)
    if total > _MAX_STATES:
        raise ModelError(f"state space has {total} states, cap is {_MAX_STATES}")
    samples = [
        Sample(id=_state_id(seq, loc), sequence=seq, location=loc)
        for seq in ("".join(p) for p in itertools.product(alphabet, repeat=n))
        for loc in locations
    ]
    return StateSpace(samples=samples, costs=build_cost_matrix(samples, oracle))


def exact_steiner_cost(space: StateSpace, terminal_ids: list[str]) -> float:
    """Exact optimum of the node-plus-edge weighted Steiner tree connecting
    ``terminal_ids`` inside the full state space."""
    terms = sorted(set(terminal_ids))
    if not 2 <= len(terms) <= _MAX_TERMINALS:
        raise ModelError(f"need 2..{_MAX_TERMINALS} distinct terminals, got {len(terms)}")
    costs = space.costs
    tidx = np.array([costs.index(t) for t in terms])
    fidx = np.array([i for i in range(len(costs)) if i not in set(tidx)], dtype=np.intp)
    if fidx.size > _MAX_FREE:
        raise ModelError(f"{fidx.size} optional states exceed the subset-scan cap {_MAX_FREE}")

    W = costs.sym_weight_matrix()
    node = costs.node_cost
    best = math.inf
    for mask in range(1 << fidx.size):
        if mask:
            extra = fidx[[b for b in range(fidx.size) if mask >> b & 1]]
            idx = np.concatenate((tidx, extra))
        else:
            idx = tidx
        total = _prim_cost(W, idx) + float(node[idx].sum())
        if total < best:
            best = total
    return best


def _prim_cost(W: np.ndarray, idx: np.ndarray) -> float:
    """MST weight of the complete graph on rows/cols ``idx`` of ``W``."""
    m = idx.size
    if m < 2:
        return 0.0
    sub = W[np.ix_(idx, idx)]
    mind = sub[0].copy()
    mind[0] = math.inf
    total = 0.0
    for _ in range(m - 1):
        j = int(np.argmin(mind))
        total += float(mind[j])
        mind = np.minimum(mind, sub[j])
        mind[j] = math.inf
    return total


def brute_force_sup_rw(G: GeoGraph, x: int, y: int, t_max: int) -> float:
    """max over 1 <= t <= t_max of P^t(x, y) by repeated vector products."""
    if t_max < 1:
        raise ModelError(f"t_max must be >= 1, got {t_max}")
    P = G.transition()
    v = np.zeros(G.num_nodes)
    v[x] = 1.0
    best = 0.0
    for _ in range(t_max):
        v = v @ P
        if v[y] > best:
            best = float(v[y])
    return best


def brute_force_sup_rw_matrix(G: GeoGraph, t_max: int) -> np.ndarray:
    """All-pairs version of :func:`brute_force_sup_rw` via matrix powers."""
    if t_max < 1:
        raise ModelError(f"t_max must be >= 1, got {t_max}")
    P = G.transition()
    M = np.eye(G.num_nodes)
    running = np.zeros_like(P)
    for _ in range(t_max):
        M = M @ P
        np.maximum(running, M, out=running)
    return running
