"""1-D maximization of log-likelihood curves over a branch duration.

Coarse log-spaced grid scan followed by golden-section refinement of the
best bracket.  No concavity is assumed; -inf values (impossible events)
are tolerated, NaN is not.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def grid_sup_t(
    f: Callable[[float], float],
    t_lo: float,
    t_hi: float,
    points: int = 200,
    refinements: int = 200,
    rel_tol: float = 1e-10,
) -> tuple[float, float]:
    """Maximize ``f`` over ``[t_lo, t_hi]``; return ``(t_star, f(t_star))``.

    Both endpoints are evaluated explicitly, so limits represented by the
    interval boundaries are always candidates.  ``t_lo`` may be 0; the
    interior grid is then log-spaced from a tiny positive time.
    """
    if not t_lo < t_hi:
        raise ValueError(f"need t_lo < t_hi, got [{t_lo}, {t_hi}]")
    if points < 50:
        raise ValueError("need at least 50 grid points")

    if t_lo > 0:
        ts = np.geomspace(t_lo, t_hi, points)
        ts = np.concatenate(([t_lo], ts[1:]))
    else:
        inner_lo = min(1e-9, t_hi * 1e-12)
        ts = np.concatenate(([t_lo], np.geomspace(inner_lo, t_hi, points)))

    vals = np.array([_checked(f, t) for t in ts])
    i = int(np.argmax(vals))
    best_t, best_v = float(ts[i]), float(vals[i])

    a = float(ts[max(i - 1, 0)])
    b = float(ts[min(i + 1, len(ts) - 1)])
    t, v = _golden_max(f, a, b, refinements, rel_tol)
    if v > best_v:
        best_t, best_v = t, v
    return best_t, best_v


def _checked(f: Callable[[float], float], t: float) -> float:
    v = float(f(t))
    if math.isnan(v) or v == math.inf:
        raise ArithmeticError(f"objective is not a valid log-likelihood at t={t}: {v}")
    return v


def _golden_max(
    f: Callable[[float], float],
    a: float,
    b: float,
    max_iter: int,
    rel_tol: float,
) -> tuple[float, float]:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = _checked(f, c), _checked(f, d)
    best_t, best_v = (c, fc) if fc >= fd else (d, fd)
    for _ in range(max_iter):
        if b - a <= rel_tol * max(1.0, abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = _checked(f, c)
            if fc > best_v:
                best_t, best_v = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = _checked(f, d)
            if fd > best_v:
                best_t, best_v = d, fd
    return best_t, best_v
