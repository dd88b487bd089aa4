"""Brownian bridge with random length and random pinning point.

The process is the deterministic bridge evaluated at an independent
random (length, pin) pair.  Everything observable about the hidden pair
flows through Bayes weights built from the bridge marginal density: the
posterior of (length, pin) given one observation, the predictive law of
a later value, and the two-time conditional that witnesses the loss of
the Markov property for absolutely continuous pins.

All posterior ratios are assembled in log space with a common probed
maximum subtracted before quadrature, so weights spanning hundreds of
orders of magnitude neither overflow nor silently vanish.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

logger = logging.getLogger(__name__)

from .bridge import PathSample, bridge_values, check_grid
from .errors import InferenceError
from .gauss import gauss_logpdf
from .laws import ContinuousPin, DiscretePins, LengthLaw, PinLaw
from .numerics import ZERO_SV, gl_nodes, sv_ratio, sv_sum


@dataclass(frozen=True)
class RandomBridgeModel:
    """Independent length law and pin law driving one bridge."""

    length: LengthLaw
    pin: PinLaw


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def random_bridge_values(model: RandomBridgeModel, times, n: int,
                         rng: np.random.Generator):
    """Exact values at `times` for n paths; returns (values, lengths, pins).

    The three sources of randomness are drawn from disjoint child streams
    of `rng`, which is how the independence assumption on (length, pin,
    driving motion) is kept structural.
    """
    s_tau, s_pin, s_w = rng.spawn(3)
    taus = np.atleast_1d(model.length.sample(s_tau, n))
    zs = np.atleast_1d(model.pin.sample(s_pin, n))
    vals = bridge_values(taus, zs, times, s_w)
    return vals, taus, zs


def sample_random_bridge(model: RandomBridgeModel, grid,
                         rng: np.random.Generator) -> PathSample:
    """One exact path on the given grid, with the hidden pair recorded."""
    grid = check_grid(grid)
    vals, taus, zs = random_bridge_values(model, grid, 1, rng)
    return PathSample.build(grid, vals[0], taus[0], zs[0])


# ---------------------------------------------------------------------------
# log-space integral pieces
# ---------------------------------------------------------------------------

# standard-normal Gauss-Legendre rule on [-10, 10]: nodes and phi-weighted
# weights, used for inner integrals against a Gaussian transition kernel
_STD_N = 96
_STD_S, _STD_W = gl_nodes(-10.0, 10.0, _STD_N)
_STD_W = _STD_W * np.exp(-0.5 * _STD_S**2) / math.sqrt(2.0 * math.pi)


def _log_marginal(t: float, x: float, r, z):
    """log bridge-marginal density of value x at time t, length r, pin z.

    Vectorized over broadcastable r and z; -inf where r <= t.
    """
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        var = t * (r - t) / r
        out = -0.5 * (np.log(2.0 * math.pi * var)) - (x - t * z / r) ** 2 / (2.0 * var)
    return np.where(r > t, out, -np.inf)


def _sv_tail(law: LengthLaw, a: float, b: float, log_terms: Callable,
             gvals: Optional[Callable] = None):
    """Scaled value of ``int_(a,b] sum_k g_k(r) exp(log_terms(r)_k) P(dr)``.

    log_terms maps an (m,) array of lengths to an (m, k) matrix of log
    weights (k = inner nodes: pin atoms or pin-quadrature cells); gvals
    maps a scalar length to the (k,) payload evaluated at those nodes.
    The probed maximum of the log weights is the common scale.
    """
    probes = [p for p in (law.tail_nodes(a, b, order=8)[0],
                          law.atoms_in(a, b)[0]) if p.size]
    if not probes:
        return ZERO_SV
    r_probe = np.concatenate(probes)
    lt = log_terms(r_probe)
    finite = np.isfinite(lt)
    if not np.any(finite):
        return ZERO_SV
    m = float(np.max(lt[finite]))
    seen = {"max": m}

    def h(r, scale):
        row = log_terms(np.asarray([r]))[0]
        good = np.isfinite(row)
        if np.any(good):
            seen["max"] = max(seen["max"], float(np.max(row[good])))
        w = np.exp(np.minimum(row - scale, 700.0), where=good,
                   out=np.zeros_like(row))
        if gvals is None:
            return float(np.sum(w))
        return float(np.sum(w * gvals(r)))

    val = law.integrate_tail(a, lambda r: h(r, m), b).value
    if seen["max"] - m > 30.0:
        # a peak between probe points dominated the scale; redo against it
        m = seen["max"]
        val = law.integrate_tail(a, lambda r: h(r, m), b).value
    return (m, val)


_GL10_S, _GL10_W = gl_nodes(-10.0, 10.0, 96)


class _ZGeometry:
    """Pin-integration nodes for inner integrals at conditioning pair (a, x).

    Discrete pins contribute their atoms.  For a continuous pin the
    z-integrand carries a Gaussian factor centered at x*r/a with scale
    sqrt(r (r-a) / a): near r = a that spike is far narrower than the pin
    density and fixed support-wide nodes cannot resolve it, so node rows
    switch to a spike-centered rule there.  `rows` returns the z nodes
    and the log of (pin density times node weight) per length.
    """

    def __init__(self, pin: PinLaw, a: float, x: float, n_z: int = 96,
                 z_breaks: Tuple[float, ...] = ()):
        self.a, self.x = a, x
        if isinstance(pin, DiscretePins):
            self.discrete = True
            self.z_fix = np.asarray(pin.points)
            self.base_fix = np.log(np.asarray(pin.probs))
            return
        self.discrete = False
        self.pin = pin
        lo, hi = pin.support
        inner = sorted(b for b in z_breaks if lo < b < hi)
        if inner:
            from .numerics import composite_gl

            edges = np.array([lo, *inner, hi])
            self.z_fix, w_fix = composite_gl(edges, max(24, n_z // edges.size))
        else:
            self.z_fix, w_fix = pin.quad_nodes(n_z)
        self.base_fix = pin.logpdf(self.z_fix) + np.log(w_fix)
        self.switch = (hi - lo) / 24.0
        # the spike rule reuses the fixed rule's node count so that node
        # matrices have one shape regardless of the per-length rule choice
        self.s, w_s = gl_nodes(-10.0, 10.0, self.z_fix.size)
        self.logw_s = np.log(w_s)

    def rows(self, r):
        """(z, log_base) matrices of shape (len(r), k)."""
        r = np.asarray(r, dtype=float)
        if self.discrete:
            z = np.broadcast_to(self.z_fix[None, :], (r.size, self.z_fix.size))
            base = np.broadcast_to(self.base_fix[None, :], z.shape)
            return z, base
        a, x = self.a, self.x
        with np.errstate(invalid="ignore"):
            sig = np.sqrt(np.maximum(r * (r - a) / a, 0.0))
        mu = x * r / a
        spike = (sig <= self.switch)[:, None]
        z_spike = mu[:, None] + sig[:, None] * self.s[None, :]
        with np.errstate(divide="ignore"):
            w_spike = self.logw_s[None, :] + np.log(sig)[:, None]
        z = np.where(spike, z_spike, self.z_fix[None, :])
        base_w = np.where(spike, w_spike, 0.0)
        base_fix = np.where(spike, 0.0, self.base_fix[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            logf = np.where(spike, self.pin.logpdf(z), 0.0)
        return z, base_w + base_fix + logf

    def log_terms(self, t: float, x: float):
        """Length -> log inner weights: marginal density times pin mass."""

        def f(r):
            r = np.asarray(r, dtype=float)
            z, base = self.rows(r)
            return _log_marginal(t, x, r[:, None], z) + base

        return f

    def payload(self, fn: Callable):
        """Length -> payload at this geometry's z nodes; fn(r, z_row)."""

        def gv(r):
            z, _ = self.rows(np.asarray([r]))
            return np.asarray(fn(r, z[0]))

        return gv


def _transition_mean_var(r, z, t: float, x: float, u: float):
    mean = (r - u) / (r - t) * x + (u - t) / (r - t) * z
    var = (r - u) * (u - t) / (r - t)
    return mean, var


def _smooth_g(g: Callable, r: float, z: np.ndarray, t: float, x: float, u: float):
    """E[g(r, z_k, Y)] with Y the pin-conditional transition law at u."""
    mean, var = _transition_mean_var(r, z, t, x, u)
    y = mean[:, None] + math.sqrt(var) * _STD_S[None, :]
    vals = g(r, z[:, None], y)
    return np.asarray(vals * _STD_W[None, :]).sum(axis=1)


def _smoothed_payload(g: Callable, z: np.ndarray, t: float, x: float, u: float):
    """Payload r -> (k,) of E[g(r, z_k, Y)] at fixed pin points z."""

    def gv(r):
        return _smooth_g(g, r, z, t, x, u)

    return gv


# ---------------------------------------------------------------------------
# posterior of (length, pin) given one observation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PosteriorTable:
    """Normalized posterior weights over (length-node, pin-value) pairs.

    Continuous components are discretized on quadrature nodes whose
    weights already include density and cell size; absorbed mass sits on
    nodes flagged by `absorbed_mask` (pin fixed at the observed value).
    """

    r_nodes: np.ndarray
    z_nodes: np.ndarray
    log_weights: np.ndarray
    absorbed_mask: np.ndarray
    absorbed_flag: bool
    log_normalizer: float

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

    def expectation(self, g: Callable) -> float:
        """Posterior mean of g(length, pin); g vectorized over arrays."""
        return float(np.sum(self.weights * g(self.r_nodes, self.z_nodes)))

    def prob_absorbed(self) -> float:
        return float(np.sum(self.weights[self.absorbed_mask]))

    def pin_probability(self, z: float) -> float:
        return float(np.sum(self.weights[self.z_nodes == z]))


def _finalize_table(r, z, logw, mask, absorbed) -> PosteriorTable:
    r, z, logw = np.asarray(r), np.asarray(z), np.asarray(logw, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    keep = np.isfinite(logw)
    if not np.any(keep):
        raise InferenceError("posterior normalizer is zero: observation "
                             "impossible under the model")
    r, z, logw, mask = r[keep], z[keep], logw[keep], mask[keep]
    norm = float(logsumexp(logw))
    return PosteriorTable(r, z, logw - norm, mask, absorbed, norm)


def posterior_tau_z(model: RandomBridgeModel, t: float, x: float,
                    n_z: int = 200) -> PosteriorTable:
    """Posterior of the hidden (length, pin) given the value x at time t.

    Discrete pin: an observation bit-exactly equal to a pin point means
    the path is absorbed and the length law is conditioned to (0, t];
    any other value has zero posterior mass on lengths <= t.  Continuous
    pin: absorbed mass weighs f(x) * P(length <= t) against the
    non-absorbed mixture, per the Bayes decomposition.
    """
    if t <= 0.0:
        raise ValueError("posterior requires t > 0")
    law = model.length
    if isinstance(model.pin, DiscretePins):
        idx = model.pin.index_of(x)
        if idx < 0:
            # absorption is bit-exact by construction; a value this close
            # to a pin without equality is treated as not absorbed
            near = min(abs(x - p) for p in model.pin.points)
            if 0.0 < near < 1e-12:
                logger.debug("observation %r within %.1e of a pin but not "
                             "bit-equal; treated as not absorbed", x, near)
        if idx >= 0:
            ta, wa = law.atoms_in(0.0, t)
            rn, wn = law.tail_nodes(0.0, t)
            r = np.concatenate([ta, rn])
            with np.errstate(divide="ignore"):
                logw = np.log(np.concatenate([wa, wn]))
            z = np.full_like(r, model.pin.points[idx])
            return _finalize_table(r, z, logw, np.ones_like(r, dtype=bool), True)
        ta, wa = law.atoms_in(t, math.inf)
        rn, wn = law.tail_nodes(t)
        r = np.concatenate([ta, rn])
        with np.errstate(divide="ignore"):
            logwr = np.log(np.concatenate([wa, wn]))
        zs = np.asarray(model.pin.points)
        logp = np.log(np.asarray(model.pin.probs))
        lw = (_log_marginal(t, x, r[:, None], zs[None, :])
              + logp[None, :] + logwr[:, None])
        rr = np.repeat(r, zs.size)
        zz = np.tile(zs, r.size)
        return _finalize_table(rr, zz, lw.ravel(),
                               np.zeros(rr.size, dtype=bool), False)

    # continuous pin
    pin = model.pin
    parts_r, parts_z, parts_lw, parts_mask = [], [], [], []
    logfx = float(pin.logpdf(x))
    ta, wa = law.atoms_in(0.0, t)
    rn, wn = law.tail_nodes(0.0, t)
    r_abs = np.concatenate([ta, rn])
    if r_abs.size:
        with np.errstate(divide="ignore"):
            lw_abs = logfx + np.log(np.concatenate([wa, wn]))
        parts_r.append(r_abs)
        parts_z.append(np.full_like(r_abs, x))
        parts_lw.append(lw_abs)
        parts_mask.append(np.ones_like(r_abs, dtype=bool))
    geom = _ZGeometry(pin, t, x, n_z)
    ta2, wa2 = law.atoms_in(t, math.inf)
    rn2, wn2 = law.tail_nodes(t)
    r_alive = np.concatenate([ta2, rn2])
    if r_alive.size:
        with np.errstate(divide="ignore"):
            logwr = np.log(np.concatenate([wa2, wn2]))
        z_rows, base = geom.rows(r_alive)
        lw = _log_marginal(t, x, r_alive[:, None], z_rows) + base + logwr[:, None]
        parts_r.append(np.repeat(r_alive, z_rows.shape[1]))
        parts_z.append(z_rows.ravel())
        parts_lw.append(lw.ravel())
        parts_mask.append(np.zeros(lw.size, dtype=bool))
    return _finalize_table(np.concatenate(parts_r), np.concatenate(parts_z),
                           np.concatenate(parts_lw), np.concatenate(parts_mask),
                           False)


# ---------------------------------------------------------------------------
# predictive law of a later value
# ---------------------------------------------------------------------------


def predict_future(model: RandomBridgeModel, t: float, x: float, u: float,
                   g: Callable, n_z: int = 200,
                   z_breaks: Tuple[float, ...] = ()) -> float:
    """E[g(length, pin, value_u) | value_t = x] for 0 < t < u.

    Three length regimes: already absorbed (value_u equals the observed
    x for continuous pins, the matched pin for discrete ones), absorbing
    inside (t, u] (value_u equals the pin), and still alive at u (the
    pin-conditional bridge transition kernel smooths g over value_u).
    g must be vectorized over (r, z, y) arrays.
    """
    if not 0.0 < t < u:
        raise ValueError("need 0 < t < u")
    law = model.length

    if isinstance(model.pin, DiscretePins):
        idx = model.pin.index_of(x)
        if idx >= 0:
            F = float(law.cdf(t))
            if F <= 0.0:
                raise InferenceError("absorbed observation has zero prior mass")
            z_i = model.pin.points[idx]
            num = law.integrate_tail(0.0, lambda r: float(g(r, z_i, z_i)), b=t).value
            return num / F
        geom = _ZGeometry(model.pin, t, x, n_z, z_breaks)
        lt = geom.log_terms(t, x)
        den = _sv_tail(law, t, math.inf, lt)
        mid = _sv_tail(law, t, u, lt,
                       gvals=geom.payload(lambda r, zr: g(r, zr, zr)))
        tail = _sv_tail(law, u, math.inf, lt,
                        gvals=geom.payload(lambda r, zr: _smooth_g(g, r, zr, t, x, u)))
        if den[1] == 0.0:
            raise InferenceError("posterior normalizer is zero")
        return sv_ratio(sv_sum([mid, tail]), den)

    pin = model.pin
    geom = _ZGeometry(pin, t, x, n_z, z_breaks)
    lt = geom.log_terms(t, x)
    logfx = float(pin.logpdf(x))
    F = float(law.cdf(t))
    absorbed_den = (logfx + math.log(F), 1.0) if F > 0.0 and np.isfinite(logfx) else ZERO_SV
    den = sv_sum([absorbed_den, _sv_tail(law, t, math.inf, lt)])
    if den[1] == 0.0:
        raise InferenceError("posterior normalizer is zero")
    if F > 0.0 and np.isfinite(logfx):
        w0 = law.integrate_tail(0.0, lambda r: float(g(r, x, x)), b=t).value
        first = (logfx, w0)
    else:
        first = ZERO_SV
    mid = _sv_tail(law, t, u, lt,
                   gvals=geom.payload(lambda r, zr: g(r, zr, zr)))
    tail = _sv_tail(law, u, math.inf, lt,
                    gvals=geom.payload(lambda r, zr: _smooth_g(g, r, zr, t, x, u)))
    return sv_ratio(sv_sum([first, mid, tail]), den)


# ---------------------------------------------------------------------------
# two-time conditional and the Markov gap
# ---------------------------------------------------------------------------


def two_time_conditional(model: RandomBridgeModel, t1: float, t2: float,
                         u: float, x1: float, x2: float, g: Callable,
                         n_z: int = 200,
                         z_breaks: Tuple[float, ...] = ()) -> float:
    """E[g(value_u) | value_{t1} = x1, value_{t2} = x2].

    Requires an absolutely continuous pin and a length law with no mass
    on (0, t1]; with an atom before t1 the observation pair can sit on
    the diagonal {value_{t1} = value_{t2} = pin}, whose law has no joint
    density, and the Bayes ratio below is not available.
    g must be vectorized over arrays of values.
    """
    if not 0.0 < t1 < t2 < u:
        raise ValueError("need 0 < t1 < t2 < u")
    if not isinstance(model.pin, ContinuousPin):
        raise ValueError("two-time conditional requires a continuous pin law")
    law = model.length
    if law.cdf(t1) > 0.0:
        raise ValueError("two-time conditioning requires zero length mass on "
                         f"(0, {t1}]")
    pin = model.pin
    geom = _ZGeometry(pin, t2, x2, n_z, z_breaks)

    # all terms share the factor p(t1, x1) p(t2-t1, x2-x1); only the
    # second factor differs between regimes, so keep it and drop the first
    log_c = float(gauss_logpdf(t2 - t1, x2 - x1))

    def l_first(r):
        # pin pinned at x2 by time t2: joint density of x1 given length r
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = gauss_logpdf(np.maximum(r - t1, 1e-300), x2 - x1) - gauss_logpdf(r, x2)
        return np.where(r > t1, out, -np.inf)[:, None]

    def l_w(r):
        # pin-integrand of the two-time joint density, r > t2
        r = np.asarray(r, dtype=float)
        z, base = geom.rows(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (gauss_logpdf(np.maximum(r[:, None] - t2, 1e-300), z - x2)
                   - gauss_logpdf(r[:, None], z) + base)
        return np.where(r[:, None] > t2, out, -np.inf)

    logfx2 = float(pin.logpdf(x2))
    r1 = _sv_tail(law, t1, t2, l_first)
    a1 = (logfx2 + r1[0], float(g(np.asarray([x2]))[0]) * r1[1])
    b1 = (logfx2 + r1[0], r1[1])

    g_mid = geom.payload(lambda r, zr: g(zr))

    def g_tail_row(r, zr):
        mean, var = _transition_mean_var(r, zr, t2, x2, u)
        y = mean[:, None] + math.sqrt(var) * _STD_S[None, :]
        return np.asarray(g(y) * _STD_W[None, :]).sum(axis=1)

    g_tail = geom.payload(g_tail_row)

    a2 = _sv_tail(law, t2, u, l_w, gvals=g_mid)
    a3 = _sv_tail(law, u, math.inf, l_w, gvals=g_tail)
    b2 = _sv_tail(law, t2, math.inf, l_w)
    a_sv = sv_sum([a1, (log_c + a2[0], a2[1]), (log_c + a3[0], a3[1])])
    b_sv = sv_sum([b1, (log_c + b2[0], b2[1])])
    if b_sv[1] == 0.0:
        raise InferenceError("two-time normalizer is zero")
    return sv_ratio(a_sv, b_sv)


def non_markov_gap(pin: ContinuousPin, T1: float, T2: float, t1: float,
                   t2: float, u: float, x1: float, x2: float, g: Callable,
                   length: Optional[LengthLaw] = None, n_z: int = 200,
                   z_breaks: Tuple[float, ...] = ()) -> Tuple[float, float, float]:
    """Two-time vs one-time conditional of g(value_u) and their gap.

    Defaults to the half/half two-point length law on {T1, T2}; with the
    required ordering 0 < t1 < T1 < t2 < T2 < u the two conditionals
    differ for generic inputs, which is exactly the failure of the
    Markov property for continuous pins.
    """
    if not 0.0 < t1 < T1 < t2 < T2 < u:
        raise ValueError("need 0 < t1 < T1 < t2 < T2 < u")
    law = length if length is not None else LengthLaw.two_point(T1, T2)
    model = RandomBridgeModel(law, pin)
    lhs = two_time_conditional(model, t1, t2, u, x1, x2, g, n_z=n_z,
                               z_breaks=z_breaks)
    rhs = predict_future(model, t2, x2, u, lambda r, z, y: g(y), n_z=n_z,
                         z_breaks=z_breaks)
    return lhs, rhs, abs(lhs - rhs)
