"""Shared numerical helpers: scaled sums and Gauss-Legendre node caches.

Mixture weights in the posterior formulas routinely live at exp(-800)
scales, so intermediate quantities are carried as (log_scale, mantissa)
pairs meaning ``mantissa * exp(log_scale)``.  The mantissa keeps the sign;
ratios of two such pairs are formed without ever leaving log range.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# value = mantissa * exp(log_scale); ZERO_SV is the additive identity
ZERO_SV = (-np.inf, 0.0)


def sv_sum(terms):
    """Sum of (log_scale, mantissa) pairs, rescaled to the largest term."""
    terms = [t for t in terms if t[1] != 0.0 and np.isfinite(t[0])]
    if not terms:
        return ZERO_SV
    m = max(t[0] for t in terms)
    s = sum(t[1] * np.exp(t[0] - m) for t in terms)
    return (m, float(s))


def sv_ratio(num, den) -> float:
    """num / den for two scaled values, as a plain float."""
    ln, vn = num
    ld, vd = den
    if vd == 0.0:
        raise ZeroDivisionError("scaled-value ratio with zero denominator")
    if vn == 0.0:
        return 0.0
    return float(vn / vd * np.exp(ln - ld))


def sv_float(t) -> float:
    ls, v = t
    if v == 0.0:
        return 0.0
    return float(v * np.exp(ls))


@lru_cache(maxsize=64)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def gl_nodes(a: float, b: float, n: int):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_gl(edges, n: int):
    """Gauss-Legendre nodes/weights on consecutive panels given by edges."""
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            x, w = gl_nodes(lo, hi, n)
            xs.append(x)
            ws.append(w)
    if not xs:
        return np.empty(0), np.empty(0)
    return np.concatenate(xs), np.concatenate(ws)
