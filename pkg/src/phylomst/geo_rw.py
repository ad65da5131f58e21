"""Random-walk transportation model on a weighted graph.

Provides the walk's stationary distribution, a spectral mixing summary,
and the three-stage estimator chain for -log sup_t P^t(x, y) over integer
times t >= 1: additive (E1), multiplicative (E2), and log-scale
multiplicative (E3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import GeoError

_LAMBDA_EPS = 1e-12


class GeoGraph:
    """Undirected weighted connected graph; self-loops permitted.

    A self-loop of weight w contributes 2w to its node's weighted degree
    (standard convention), so pi(v) = deg_w(v) / (2 * total weight).
    """

    def __init__(self, weight_matrix: np.ndarray):
        W = np.asarray(weight_matrix, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise GeoError("weight matrix must be square")
        if not np.allclose(W, W.T, atol=1e-12):
            raise GeoError("weight matrix must be symmetric")
        if np.any(W < 0):
            raise GeoError("edge weights must be nonnegative")
        self.W = W
        self.degree = W.sum(axis=1)
        if np.any(self.degree <= 0):
            raise GeoError("every node needs at least one incident edge")
        if not self._connected():
            raise GeoError("graph is not connected")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int, float]], num_nodes: int | None = None) -> "GeoGraph":
        """Build from (u, v, weight) triples; duplicate edges are summed."""
        edges = list(edges)
        if not edges:
            raise GeoError("empty edge list")
        top = max(max(u, v) for u, v, _ in edges)
        L = num_nodes if num_nodes is not None else top + 1
        if top >= L:
            raise GeoError(f"node id {top} out of range for {L} nodes")
        W = np.zeros((L, L))
        for u, v, w in edges:
            if u < 0 or v < 0:
                raise GeoError(f"negative node id in edge ({u}, {v})")
            if w <= 0:
                raise GeoError(f"edge ({u}, {v}) has non-positive weight {w}")
            if u == v:
                W[u, u] += 2.0 * w
            else:
                W[u, v] += w
                W[v, u] += w
        return cls(W)

    @property
    def num_nodes(self) -> int:
        return self.W.shape[0]

    def transition(self) -> np.ndarray:
        """Row-stochastic walk matrix P(u, v) = W(u, v) / deg(u)."""
        return self.W / self.degree[:, None]

    def _connected(self) -> bool:
        L = self.W.shape[0]
        seen = np.zeros(L, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for v in np.nonzero(self.W[u] > 0)[0]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        return bool(seen.all())


@dataclass(frozen=True)
class SpectralInfo:
    """Stationary distribution, mixing eigenvalue, and the square-root
    ratio R = sqrt(max pi / min pi) controlling the convergence bound
    |P^t(a,b) - pi(b)| <= R * lam^t."""

    pi: np.ndarray
    lam: float
    ratio_sqrt: float


@dataclass(frozen=True)
class GeoBounds:
    """Certified envelope 0 < lower <= sup_t P^t(x,y) <= upper < 1 holding
    for every ordered node pair."""

    lower: float
    upper: float

    def __post_init__(self):
        if not 0 < self.lower <= self.upper < 1:
            raise GeoError(f"invalid bounds ({self.lower}, {self.upper})")


def rw_stationary(G: GeoGraph) -> np.ndarray:
    """pi(v) = deg_w(v) / (2 * total edge weight)."""
    return G.degree / G.degree.sum()


def mixing_lambda(G: GeoGraph) -> SpectralInfo:
    """Spectral summary of the walk via the symmetric normalization
    D^{-1/2} W D^{-1/2}; rejects walks that do not mix (bipartite)."""
    d = np.sqrt(G.degree)
    N = G.W / np.outer(d, d)
    eigs = np.linalg.eigvalsh(N)
    top = int(np.argmax(eigs))
    rest = np.delete(eigs, top)
    lam = float(np.max(np.abs(rest))) if rest.size else 0.0
    if lam >= 1.0 - _LAMBDA_EPS:
        raise GeoError(
            "walk does not mix (lambda >= 1): graph is bipartite or nearly so; "
            "a small self-loop on any node repairs this"
        )
    pi = rw_stationary(G)
    ratio_sqrt = math.sqrt(pi.max() / pi.min())
    return SpectralInfo(pi=pi, lam=lam, ratio_sqrt=ratio_sqrt)


def cutoff_time(spec: SpectralInfo, eps1: float, b: int) -> int:
    """Smallest integer t' >= 1 with R * lam^t' <= eps1 * pi(b); past t'
    the walk probability into ``b`` is within eps1*pi(b) of pi(b)."""
    if eps1 <= 0:
        raise GeoError(f"eps1 must be positive, got {eps1}")
    target = eps1 * float(spec.pi[b])
    R, lam = spec.ratio_sqrt, spec.lam
    if lam <= 0 or R <= target:
        return 1
    t = max(1, math.ceil(math.log(target / R) / math.log(lam)))
    while R * lam**t > target:
        t += 1
    while t > 1 and R * lam ** (t - 1) <= target:
        t -= 1
    return t


def sup_rw_additive(
    G: GeoGraph, x: int, y: int, eps1: float, spec: SpectralInfo | None = None
) -> float:
    """E1: estimate of sup_{t>=1} P^t(x, y) with additive error <= eps1.

    Scans P^t(x, y) for t up to the cutoff by repeated vector-matrix
    products and floors the tail with pi(y).
    """
    if spec is None:
        spec = mixing_lambda(G)
    tprime = cutoff_time(spec, eps1, y)
    P = G.transition()
    v = np.zeros(G.num_nodes)
    v[x] = 1.0
    best = 0.0
    for _ in range(tprime):
        v = v @ P
        if v[y] > best:
            best = float(v[y])
    return max(best, float(spec.pi[y]))


def sup_rw_multiplicative(
    G: GeoGraph, x: int, y: int, eps2: float, spec: SpectralInfo | None = None
) -> float:
    """E2 = (1 +- eps2) * sup_t P^t(x, y), via E1 at eps1 = min(pi) * eps2."""
    if not 0 < eps2 < 1:
        raise GeoError(f"eps2 must be in (0, 1), got {eps2}")
    if spec is None:
        spec = mixing_lambda(G)
    A = float(spec.pi.min())
    return sup_rw_additive(G, x, y, A * eps2, spec)


def neg_log_sup_rw(
    G: GeoGraph,
    x: int,
    y: int,
    eps3: float,
    bounds: GeoBounds,
    spec: SpectralInfo | None = None,
) -> float:
    """E3 = (1 +- eps3) * (-log sup_t P^t(x, y)).

    Requires 0 < eps3 <= -log(bounds.upper); raises GeoError when the
    estimate contradicts the certified upper bound.
    """
    neg_log_b = -math.log(bounds.upper)
    if not 0 < eps3 <= neg_log_b:
        raise GeoError(f"eps3 must lie in (0, {neg_log_b:.6g}] = (0, -log B], got {eps3}")
    eps2 = 0.5 * eps3 * neg_log_b
    if eps2 >= 0.5:
        raise GeoError(f"derived eps2 = {eps2:.6g} >= 1/2; shrink eps3")
    e2 = sup_rw_multiplicative(G, x, y, eps2, spec)
    # e2 / (1 + eps2) is a certified lower bound on the true supremum
    if e2 / (1.0 + eps2) > bounds.upper * (1.0 + 1e-9):
        raise GeoError(
            f"supremum for pair ({x}, {y}) exceeds the certified upper bound {bounds.upper:.6g}"
        )
    return -math.log(e2)


def derive_bounds(G: GeoGraph, spec: SpectralInfo | None = None) -> GeoBounds:
    """Construct a valid (lower, upper) envelope for all pairwise suprema.

    lower = min pi (the walk limit itself); upper = the largest additive
    estimate across ordered pairs plus its error slack, clamped below 1.
    """
    if spec is None:
        spec = mixing_lambda(G)
    pi = spec.pi
    A = float(pi.min())
    eps1 = A / 10.0
    L = G.num_nodes
    tmax = max(cutoff_time(spec, eps1, b) for b in range(L))
    P = G.transition()
    M = np.eye(L)
    running = np.zeros((L, L))
    for _ in range(tmax):
        M = M @ P
        np.maximum(running, M, out=running)
    est = np.maximum(running, pi[None, :])
    upper = float(est.max()) + eps1
    upper = min(1.0 - 1e-6, upper)
    upper = max(upper, A)
    return GeoBounds(lower=A, upper=upper)
