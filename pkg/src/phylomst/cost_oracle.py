"""Per-sample node costs, per-pair edge costs, and the spanning-tree
weight matrix they induce.

Two edge-cost modes are supported.  ``independent`` (default) optimizes
the sequence block over its own continuous duration and the location
coordinate over its own integer duration; ``shared_t`` forces a single
integer duration on the whole product chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeoError, ModelError
from .geo_rw import (
    GeoBounds,
    GeoGraph,
    SpectralInfo,
    cutoff_time,
    derive_bounds,
    mixing_lambda,
    neg_log_sup_rw,
    sup_rw_additive,
)
from .substitution import SiteModel, count_matrix, sup_seq_loglik

_TINY = 1e-300
_EXACT_SCAN_EPS = 1e-12


@dataclass(frozen=True)
class Sample:
    """A terminal: identifier, aligned sequence, optional location node."""

    id: str
    sequence: str
    location: int | None = None


@dataclass(frozen=True)
class EdgeCost:
    """Directed pair cost phi(u, v) with its diagnostics."""

    phi: float
    t_star: float
    seq_cost: float
    geo_cost: float


class GeoCostModel:
    """Location-coordinate cost component over a random-walk graph.

    With ``eps3 = None`` suprema are resolved by an exact scan (additive
    error 1e-12); otherwise the estimator chain with relative error eps3
    on the log scale is used.
    """

    def __init__(
        self,
        graph: GeoGraph,
        eps3: float | None = None,
        bounds: GeoBounds | None = None,
    ):
        self.graph = graph
        self.spectral: SpectralInfo = mixing_lambda(graph)
        self.bounds = bounds if bounds is not None else derive_bounds(graph, self.spectral)
        self.eps3 = eps3
        self._cache: dict[tuple[int, int], float] = {}

    def node_cost(self, location: int) -> float:
        self._check_node(location)
        return -math.log(float(self.spectral.pi[location]))

    def edge_cost(self, x: int, y: int) -> float:
        """-log sup_{t>=1} P^t(x, y), exact scan or E3 estimate."""
        self._check_node(x)
        self._check_node(y)
        key = (x, y)
        if key not in self._cache:
            if self.eps3 is None:
                zeta = sup_rw_additive(self.graph, x, y, _EXACT_SCAN_EPS, self.spectral)
                self._cache[key] = -math.log(zeta)
            else:
                self._cache[key] = neg_log_sup_rw(
                    self.graph, x, y, self.eps3, self.bounds, self.spectral
                )
        return self._cache[key]

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.graph.num_nodes:
            raise ModelError(f"location {v} is not a node of the geo graph")


class CostOracle:
    """Evaluates phi(v), phi(u, v), w(u, v) and w'(u, v) for samples."""

    def __init__(
        self,
        site_model: SiteModel,
        geo: GeoCostModel | None = None,
        mode: str = "independent",
    ):
        if mode not in ("independent", "shared_t"):
            raise ModelError(f"unknown edge-cost mode {mode!r}")
        self.site_model = site_model
        self.geo = geo
        self.mode = mode
        self._seq_cache: dict[bytes, tuple[float, float]] = {}
        self._shared_cache: dict[tuple[bytes, int, int], tuple[float, float]] = {}
        self._neg_log_pi = -np.log(site_model.stationary())

    def node_cost(self, s: Sample) -> float:
        """phi(v) = -log pi(sequence) - log pi_G(location)."""
        idx = self.site_model.encode(s.sequence)
        cost = float(self._neg_log_pi[idx].sum())
        if s.location is not None:
            if self.geo is None:
                raise ModelError(f"sample {s.id!r} carries a location but no geo model is set")
            cost += self.geo.node_cost(s.location)
        return cost

    def edge_cost(self, u: Sample, v: Sample) -> EdgeCost:
        """Directed cost phi(u, v) = -log of the optimized pair likelihood."""
        counts = count_matrix(self.site_model, u.sequence, v.sequence)
        has_geo = u.location is not None and v.location is not None
        if (u.location is None) != (v.location is None):
            raise ModelError(f"samples {u.id!r} and {v.id!r} disagree on having locations")
        if has_geo and self.geo is None:
            raise ModelError("samples carry locations but no geo model is set")

        if self.mode == "shared_t" and has_geo:
            phi, t_star = self._shared_edge_cost(counts, u.location, v.location)
            return EdgeCost(phi=phi, t_star=t_star, seq_cost=math.nan, geo_cost=math.nan)

        t_star, seq_cost = self._seq_sup(counts)
        geo_cost = self.geo.edge_cost(u.location, v.location) if has_geo else 0.0
        return EdgeCost(phi=seq_cost + geo_cost, t_star=t_star, seq_cost=seq_cost, geo_cost=geo_cost)

    def mst_weight(self, u: Sample, v: Sample) -> float:
        """Spanning-tree weight w(u, v) = phi(u, v) - phi(v)."""
        return self.edge_cost(u, v).phi - self.node_cost(v)

    def symmetric_weight(self, u: Sample, v: Sample) -> float:
        """w'(u, v) = (phi(u,v) + phi(v,u) - phi(u) - phi(v)) / 2."""
        return 0.5 * (
            self.edge_cost(u, v).phi
            + self.edge_cost(v, u).phi
            - self.node_cost(u)
            - self.node_cost(v)
        )

    # -- internals ---------------------------------------------------------

    def _seq_sup(self, counts: np.ndarray) -> tuple[float, float]:
        key = counts.tobytes()
        if key not in self._seq_cache:
            self._seq_cache[key] = sup_seq_loglik(self.site_model, counts)
        return self._seq_cache[key]

    def _seq_loglik_at(self, counts: np.ndarray, t: float) -> float:
        P = np.maximum(self.site_model.transition_matrix(t), _TINY)
        return float(np.sum(counts * np.log(P)))

    def _shared_edge_cost(self, counts: np.ndarray, lu: int, lv: int) -> tuple[float, float]:
        """Single supremum over integer t of walk probability times the
        sequence likelihood: explicit scan up to the mixing cutoff, then a
        stationary-walk tail around the sequence optimum."""
        key = (counts.tobytes(), lu, lv)
        if key in self._shared_cache:
            return self._shared_cache[key]

        geo = self.geo
        spec = geo.spectral
        tprime = cutoff_time(spec, 1e-9, lv)
        P = geo.graph.transition()
        vec = np.zeros(geo.graph.num_nodes)
        vec[lu] = 1.0
        best = -math.inf
        best_t: float = 1.0
        for t in range(1, tprime + 1):
            vec = vec @ P
            val = math.log(max(float(vec[lv]), _TINY)) + self._seq_loglik_at(counts, t)
            if val > best:
                best, best_t = val, float(t)

        # tail t >= t': walk factor ~ pi(lv); sequence factor peaks at its
        # own optimum, so probe the nearest admissible integers and the
        # stationary limit
        log_pi_v = math.log(float(spec.pi[lv]))
        t_seq, _ = self._seq_sup(counts)
        cand: set[int] = {tprime}
        if math.isfinite(t_seq):
            cand.add(max(tprime, math.floor(t_seq)))
            cand.add(max(tprime, math.ceil(t_seq)))
        for t in sorted(c for c in cand if c >= 1):
            val = log_pi_v + self._seq_loglik_at(counts, t)
            if val > best:
                best, best_t = val, float(t)
        limit = log_pi_v + float(counts.sum(axis=0) @ np.log(self.site_model.stationary()))
        if limit > best:
            best, best_t = limit, math.inf

        result = (-best, best_t)
        self._shared_cache[key] = result
        return result


class CostMatrix:
    """All pairwise costs of a sample set: node costs phi(v), the full
    directed phi(u, v) matrix, and the mirrored spanning-tree weights w."""

    def __init__(
        self,
        ids: list[str],
        node_cost: np.ndarray,
        phi: np.ndarray,
        weight: np.ndarray,
        t_star: np.ndarray,
        geo_cost: np.ndarray,
    ):
        self.ids = list(ids)
        self.node_cost = node_cost
        self.phi = phi
        self.weight = weight
        self.t_star = t_star
        self.geo_cost = geo_cost
        self._index = {s: i for i, s in enumerate(self.ids)}

    def __len__(self) -> int:
        return len(self.ids)

    def index(self, sample_id: str) -> int:
        try:
            return self._index[sample_id]
        except KeyError:
            raise ModelError(f"unknown sample id {sample_id!r}") from None

    def phi_node(self, v: str) -> float:
        return float(self.node_cost[self.index(v)])

    def phi_edge(self, u: str, v: str) -> float:
        return float(self.phi[self.index(u), self.index(v)])

    def w(self, u: str, v: str) -> float:
        return float(self.weight[self.index(u), self.index(v)])

    def sym_weight(self, u: str, v: str) -> float:
        i, j = self.index(u), self.index(v)
        return float(
            0.5 * (self.phi[i, j] + self.phi[j, i] - self.node_cost[i] - self.node_cost[j])
        )

    def sym_weight_matrix(self) -> np.ndarray:
        return 0.5 * (
            self.phi + self.phi.T - self.node_cost[:, None] - self.node_cost[None, :]
        )


def build_cost_matrix(samples: list[Sample], oracle: CostOracle) -> CostMatrix:
    """Populate node costs and all k(k-1)/2 pair weights; the weight matrix
    is computed on one orientation and mirrored."""
    if len(samples) < 2:
        raise ModelError("need at least 2 samples")
    ids = [s.id for s in samples]
    if len(set(ids)) != len(ids):
        raise ModelError("duplicate sample ids")
    lengths = {len(s.sequence) for s in samples}
    if len(lengths) != 1:
        raise ModelError(f"samples have inconsistent sequence lengths: {sorted(lengths)}")
    with_loc = [s for s in samples if s.location is not None]
    if with_loc and len(with_loc) != len(samples):
        missing = [s.id for s in samples if s.location is None]
        raise ModelError(f"samples without locations in a located run: {missing}")

    k = len(samples)
    node = np.empty(k)
    for i, s in enumerate(samples):
        try:
            node[i] = oracle.node_cost(s)
        except (ModelError, GeoError) as exc:
            raise type(exc)(f"node cost for sample {s.id!r} failed: {exc}") from exc
    phi = np.zeros((k, k))
    t_star = np.full((k, k), np.nan)
    geo_cost = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            try:
                ec = oracle.edge_cost(samples[i], samples[j])
            except (ModelError, GeoError) as exc:
                raise type(exc)(
                    f"cost for pair ({ids[i]!r}, {ids[j]!r}) failed: {exc}"
                ) from exc
            phi[i, j] = ec.phi
            t_star[i, j] = ec.t_star
            geo_cost[i, j] = ec.geo_cost

    weight = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            w = phi[i, j] - node[j]
            weight[i, j] = w
            weight[j, i] = w
    return CostMatrix(ids, node, phi, weight, t_star, geo_cost)
