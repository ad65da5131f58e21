"""Reversible per-site substitution models.

Three model families share one interface: a stationary distribution, a
transition kernel P^t, and the supremum over branch duration t of the
product likelihood of an aligned sequence pair.  The two symmetric models
(binary and JC69) have closed-form suprema; GTR falls back to a numeric
1-D maximizer.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .errors import ModelError
from .optimize import grid_sup_t

LN2 = math.log(2.0)
LN4 = math.log(4.0)

_TINY = 1e-300
_GRID_LO = 1e-6
_GRID_HI = 1e3
_GRID_POINTS = 200


def _check_time(t: float) -> None:
    if not math.isfinite(t) or t < 0:
        raise ModelError(f"branch duration must be finite and >= 0, got {t}")


class SiteModel:
    """Common interface of the per-site substitution models."""

    alphabet: str

    @property
    def size(self) -> int:
        return len(self.alphabet)

    def stationary(self) -> np.ndarray:
        raise NotImplementedError

    def transition_matrix(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def encode(self, sequence: str) -> np.ndarray:
        """Map a symbol string to index array, rejecting foreign symbols."""
        idx = np.empty(len(sequence), dtype=np.intp)
        lookup = {c: i for i, c in enumerate(self.alphabet)}
        for pos, c in enumerate(sequence):
            try:
                idx[pos] = lookup[c]
            except KeyError:
                raise ModelError(
                    f"symbol {c!r} at position {pos} is not in alphabet {self.alphabet!r}"
                ) from None
        return idx

    def _symbol_index(self, a) -> int:
        if isinstance(a, str):
            i = self.alphabet.find(a)
            if i < 0:
                raise ModelError(f"symbol {a!r} not in alphabet {self.alphabet!r}")
            return i
        i = int(a)
        if not 0 <= i < self.size:
            raise ModelError(f"symbol index {i} out of range for alphabet size {self.size}")
        return i


@dataclass(frozen=True)
class BinarySymmetric(SiteModel):
    """Two-state symmetric model with flip rate mu."""

    mu: float
    alphabet: ClassVar[str] = "01"

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ModelError(f"rate mu must be positive, got {self.mu}")

    def stationary(self) -> np.ndarray:
        return np.array([0.5, 0.5])

    def transition_matrix(self, t: float) -> np.ndarray:
        _check_time(t)
        z = math.exp(-2.0 * self.mu * t)
        same = 0.5 + 0.5 * z
        diff = 0.5 - 0.5 * z
        return np.array([[same, diff], [diff, same]])


@dataclass(frozen=True)
class JC69(SiteModel):
    """Jukes-Cantor 1969: 4 states, uniform stationary, single rate mu.

    P^t(a,a) = 1/4 + 3/4 e^{-mu t},  P^t(a,b) = 1/4 - 1/4 e^{-mu t}.
    """

    mu: float
    alphabet: ClassVar[str] = "ACGT"

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ModelError(f"rate mu must be positive, got {self.mu}")

    def stationary(self) -> np.ndarray:
        return np.full(4, 0.25)

    def transition_matrix(self, t: float) -> np.ndarray:
        _check_time(t)
        z = math.exp(-self.mu * t)
        same = 0.25 + 0.75 * z
        diff = 0.25 - 0.25 * z
        P = np.full((4, 4), diff)
        np.fill_diagonal(P, same)
        return P

    def rate_matrix(self) -> np.ndarray:
        Q = np.full((4, 4), self.mu / 4.0)
        np.fill_diagonal(Q, -0.75 * self.mu)
        return Q


class GTR(SiteModel):
    """General time-reversible model from a stationary vector and a
    symmetric exchangeability matrix (zero diagonal).

    The rate matrix Q_ab = S_ab * pi_b (a != b) satisfies detailed balance
    by construction; P^t = exp(Qt) is computed through the symmetric
    eigendecomposition of Pi^{1/2} Q Pi^{-1/2}.
    """

    def __init__(self, pi, exchange, alphabet: str | None = None):
        pi = np.asarray(pi, dtype=float)
        S = np.asarray(exchange, dtype=float)
        m = pi.size
        if m < 2:
            raise ModelError("GTR needs an alphabet of size >= 2")
        if np.any(pi <= 0) or abs(pi.sum() - 1.0) > 1e-12:
            raise ModelError("stationary vector must be positive and sum to 1")
        if S.shape != (m, m):
            raise ModelError(f"exchangeability matrix must be {m}x{m}")
        if not np.allclose(S, S.T, atol=1e-12) or np.any(S < 0):
            raise ModelError("exchangeability matrix must be symmetric and nonnegative")
        if np.any(np.diag(S) != 0):
            raise ModelError("exchangeability matrix must have zero diagonal")
        if alphabet is None:
            alphabet = "ACGT" if m == 4 else string.ascii_uppercase[:m]
        if len(alphabet) != m:
            raise ModelError("alphabet length must match pi")

        self.alphabet = alphabet
        self.pi = pi
        self.exchange = S

        Q = S * pi[None, :]
        np.fill_diagonal(Q, 0.0)
        np.fill_diagonal(Q, -Q.sum(axis=1))
        self.Q = Q

        d = np.sqrt(pi)
        B = (Q * d[:, None]) / d[None, :]
        B = 0.5 * (B + B.T)  # kill asymmetric rounding noise
        w, U = np.linalg.eigh(B)
        self._eigvals = w
        self._U = U
        self._d = d
        # cache for the coarse log-likelihood grid used by the supremum search
        self._grid_ts: np.ndarray | None = None
        self._grid_logP: np.ndarray | None = None

    def stationary(self) -> np.ndarray:
        return self.pi.copy()

    def transition_matrix(self, t: float) -> np.ndarray:
        _check_time(t)
        M = (self._U * np.exp(self._eigvals * t)) @ self._U.T
        P = (M / self._d[:, None]) * self._d[None, :]
        np.maximum(P, 0.0, out=P)
        return P

    def _log_prob_grid(self) -> tuple[np.ndarray, np.ndarray]:
        if self._grid_logP is None:
            ts = np.geomspace(_GRID_LO, _GRID_HI, _GRID_POINTS)
            stack = np.empty((ts.size, self.size, self.size))
            for i, t in enumerate(ts):
                stack[i] = np.log(np.maximum(self.transition_matrix(t), _TINY))
            self._grid_ts = ts
            self._grid_logP = stack
        return self._grid_ts, self._grid_logP


def transition_prob(model: SiteModel, a, b, t: float) -> float:
    """Probability of symbol ``a`` turning into ``b`` over duration ``t``."""
    i = model._symbol_index(a)
    j = model._symbol_index(b)
    return float(model.transition_matrix(t)[i, j])


def stationary(model: SiteModel) -> np.ndarray:
    return model.stationary()


def count_matrix(model: SiteModel, x: str, y: str) -> np.ndarray:
    """m x m site-pattern counts of an aligned pair; entry [a, b] counts
    sites where ``x`` shows a and ``y`` shows b."""
    if len(x) != len(y):
        raise ModelError(f"sequence lengths differ: {len(x)} vs {len(y)}")
    xi = model.encode(x)
    yi = model.encode(y)
    m = model.size
    C = np.zeros((m, m), dtype=np.int64)
    np.add.at(C, (xi, yi), 1)
    return C


def sup_seq_loglik(model: SiteModel, counts: np.ndarray) -> tuple[float, float]:
    """Supremum over t >= 0 of the product pair likelihood, as
    ``(t_star, -log sup)``.

    ``t_star`` is ``math.inf`` when the supremum is a limit rather than
    attained (the returned cost is then the limit value).
    """
    C = np.asarray(counts)
    m = model.size
    if C.shape != (m, m):
        raise ModelError(f"count matrix must be {m}x{m}, got {C.shape}")
    if np.any(C < 0):
        raise ModelError("count matrix entries must be nonnegative")
    n = int(C.sum())
    if n < 1:
        raise ModelError("count matrix is empty")
    d = n - int(np.trace(C))

    if isinstance(model, JC69):
        return _sup_closed(n, d, model.mu, states=4)
    if isinstance(model, BinarySymmetric):
        return _sup_closed(n, d, 2.0 * model.mu, states=2)
    return _sup_gtr(model, C)


def _sup_closed(n: int, d: int, decay_rate: float, states: int) -> tuple[float, float]:
    # z := exp(-decay_rate * t);  P_same = (1 + (m-1) z)/m,  P_diff = (1 - z)/m
    m = states
    if d == 0:
        return 0.0, 0.0
    if m * d < (m - 1) * n:  # interior stationary point, d/n < (m-1)/m
        z = 1.0 - m * d / ((m - 1) * n)
        t_star = -math.log(z) / decay_rate
        p_same = (1.0 + (m - 1) * z) / m
        p_diff = (1.0 - z) / m
        cost = -((n - d) * math.log(p_same) + d * math.log(p_diff))
        return t_star, cost
    return math.inf, n * math.log(m)


def _sup_gtr(model: GTR, C: np.ndarray) -> tuple[float, float]:
    n = int(C.sum())
    if n - int(np.trace(C)) == 0:
        return 0.0, 0.0

    Cf = C.astype(float)

    def loglik(t: float) -> float:
        P = np.maximum(model.transition_matrix(t), _TINY)
        return float(np.sum(Cf * np.log(P)))

    ts, logP = model._log_prob_grid()
    grid_vals = np.einsum("tab,ab->t", logP, Cf)
    i = int(np.argmax(grid_vals))
    a = float(ts[max(i - 1, 0)])
    b = float(ts[min(i + 1, ts.size - 1)])
    t_star, best = grid_sup_t(loglik, a, b, points=50, rel_tol=1e-10)

    # limit t -> infinity: rows of P^t converge to pi
    limit = float(Cf.sum(axis=0) @ np.log(model.pi))
    if limit > best:
        return math.inf, -limit
    return t_star, -best


def seq_sup_cost(model: SiteModel, x: str, y: str) -> tuple[float, float]:
    """Convenience wrapper: ``sup_seq_loglik`` on the counts of a pair."""
    return sup_seq_loglik(model, count_matrix(model, x, y))
