"""Two-point-pinned bridge information process: kernel, filter, drift.

The process starts at zero and is pinned at z1 (probability p1) or z2 at
a random time with law `length`; once it touches its pin it stays there,
and hitting a pin is observable, so absorption acts as the act-now
signal.  Everything here is driven by the likelihood-ratio weight

    phi_s^i(r, x) = sqrt(r / (r-s)) * exp(-((z_i-x)^2/(r-s) - z_i^2/r)/2)

for length r > s, the weight of (length r, pin z_i) given a non-absorbed
observation x at time s.  Its transition kernel lives on the mixed
measure `delta_{z1} + delta_{z2} + dy`; the drift of the semimartingale
decomposition is the phi-weighted posterior mean of (pin - x)/(length - s).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from .bridge import PathSample, check_grid
from .errors import InferenceError
from .gauss import gauss_logpdf, gauss_pdf
from .laws import DiscretePins, LengthLaw
from .numerics import composite_gl, sv_ratio, sv_sum
from .random_bridge import (RandomBridgeModel, _smoothed_payload, _sv_tail,
                            _STD_S, _STD_W, random_bridge_values)

_DRIFT_SCALE_ENV = "RANDBRIDGE_DRIFT_SCALE"  # fault-injection hook for tests


@dataclass(frozen=True)
class InfoModel:
    """Two-point pin (z1 w.p. p1, z2 otherwise) over a length law."""

    length: LengthLaw
    z1: float
    z2: float
    p1: float

    def __post_init__(self) -> None:
        if self.z1 == self.z2:
            raise ValueError("the two pin levels must differ")
        if not 0.0 < self.p1 < 1.0:
            raise ValueError("p1 must lie strictly between 0 and 1")

    @property
    def p2(self) -> float:
        return 1.0 - self.p1

    @property
    def pin_points(self) -> np.ndarray:
        return np.array([self.z1, self.z2])

    @property
    def pin_probs(self) -> np.ndarray:
        return np.array([self.p1, self.p2])

    def pins(self) -> DiscretePins:
        return DiscretePins((self.z1, self.z2), (self.p1, self.p2))

    def as_random_bridge(self) -> RandomBridgeModel:
        return RandomBridgeModel(self.length, self.pins())

    def is_pin(self, x: float) -> bool:
        return x == self.z1 or x == self.z2


# ---------------------------------------------------------------------------
# phi weights
# ---------------------------------------------------------------------------


def _log_phi(s: float, r, x, z):
    """log phi weight, vectorized over broadcastable r, x, z; -inf for r <= s."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        d = np.asarray(z) - np.asarray(x)
        out = 0.5 * np.log(r / (r - s)) - 0.5 * (d * d / (r - s) - np.asarray(z) ** 2 / r)
    return np.where(r > s, out, -np.inf)


def log_phi_weight(model: InfoModel, i: int, s: float, r, x):
    """log of :func:`phi_weight` for pin index i in {1, 2}."""
    if i not in (1, 2):
        raise ValueError("pin index must be 1 or 2")
    if s < 0.0:
        raise ValueError("time must be nonnegative")
    z = model.z1 if i == 1 else model.z2
    out = _log_phi(s, r, x, z)
    return float(out) if np.ndim(out) == 0 else out


def phi_weight(model: InfoModel, i: int, s: float, r, x):
    """Likelihood-ratio weight of (length r, pin z_i) at observation (s, x).

    Zero for r <= s, and extended continuously by zero as r decreases to
    s for x != z_i (the exponential term dominates the square-root blowup).
    """
    out = np.exp(log_phi_weight(model, i, s, r, x))
    return float(out) if np.ndim(out) == 0 else out


def _phi_terms(model: InfoModel, s: float, x: float):
    zs = model.pin_points
    logp = np.log(model.pin_probs)

    def f(r):
        return _log_phi(s, np.asarray(r)[:, None], x, zs[None, :]) + logp[None, :]

    return f


def _mixture_sv(model: InfoModel, s: float, x: float, a: float, b: float = math.inf,
                gvals: Optional[Callable] = None):
    return _sv_tail(model.length, a, b, _phi_terms(model, s, x), gvals=gvals)


# ---------------------------------------------------------------------------
# transition kernel on the mixed measure
# ---------------------------------------------------------------------------


@dataclass
class MixedDensity:
    """One transition-kernel value: two atoms plus a Lebesgue density.

    `lebesgue` is a vectorized callable; it is supported inside
    `y_window` up to mass below every tolerance used here.  Against the
    reference measure delta_{z1} + delta_{z2} + dy the three parts sum
    to one.
    """

    z1: float
    z2: float
    atom1: float
    atom2: float
    lebesgue: Callable
    y_window: Tuple[float, float]

    def atom(self, i: int) -> float:
        return self.atom1 if i == 1 else self.atom2

    def lebesgue_mass(self, order: int = 32) -> float:
        lo, hi = self.y_window
        inner = [z for z in (self.z1, self.z2) if lo < z < hi]
        edges = np.unique(np.concatenate([np.linspace(lo, hi, 33), inner]))
        y, w = composite_gl(edges, order)
        return float(np.sum(w * self.lebesgue(y)))

    def total_mass(self, order: int = 32) -> float:
        return self.atom1 + self.atom2 + self.lebesgue_mass(order)


def info_transition(model: InfoModel, t: float, x: float, u: float,
                    node_order: int = 24) -> MixedDensity:
    """Transition kernel of the information process from (t, x) to time u.

    An absorbed x (equal to a pin) stays put: unit atom.  Otherwise the
    atom at z_i carries the posterior mass of lengths in (t, u] paired
    with pin i, and the Lebesgue part is the Gaussian increment density
    reweighted by the ratio of phi mixtures at u and t.
    """
    if not 0.0 < t < u:
        raise ValueError("need 0 < t < u")
    if model.is_pin(x):
        return MixedDensity(model.z1, model.z2, float(x == model.z1),
                            float(x == model.z2), lambda y: np.zeros_like(np.asarray(y, dtype=float)),
                            (x, x))
    den = _mixture_sv(model, t, x, t)
    if den[1] == 0.0:
        raise InferenceError("phi mixture vanished at the conditioning point")
    log_den = den[0] + math.log(den[1])
    atoms = []
    for i, (z, p) in enumerate(zip(model.pin_points, model.pin_probs), start=1):
        def terms(r, z=z, p=p):
            return _log_phi(t, np.asarray(r)[:, None], x, z) + math.log(p)

        part = _sv_tail(model.length, t, u, terms)
        atoms.append(sv_ratio(part, den))

    law = model.length
    ta, wa = law.atoms_in(u, math.inf)
    rn, wn = law.tail_nodes(u, order=node_order)
    r_nodes = np.concatenate([ta, rn])
    with np.errstate(divide="ignore"):
        logw = np.log(np.concatenate([wa, wn]))
    zs, logp = model.pin_points, np.log(model.pin_probs)
    half_w = 12.0 * math.sqrt(u - t)

    def leb(y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if r_nodes.size == 0:
            out = np.zeros_like(y)
            return out if out.shape else float(out)
        lt = (_log_phi(u, r_nodes[None, :, None], y[:, None, None], zs[None, None, :])
              + logp[None, None, :] + logw[None, :, None])
        log_du = logsumexp(lt.reshape(y.size, -1), axis=1)
        out = np.exp(gauss_logpdf(u - t, y, x) + log_du - log_den)
        # the kernel's Lebesgue part does not charge the pins themselves
        out[(y == model.z1) | (y == model.z2)] = 0.0
        return out

    return MixedDensity(model.z1, model.z2, atoms[0], atoms[1], leb,
                        (x - half_w, x + half_w))


# ---------------------------------------------------------------------------
# filtering
# ---------------------------------------------------------------------------


def info_posterior(model: InfoModel, t: float, x: float, absorbed: bool,
                   g: Callable) -> float:
    """E[g(length, pin) | observation x at t, absorption flag].

    Absorbed observations (x equal to the realized pin) condition the
    length law to (0, t]; non-absorbed ones use the phi-weighted mixture
    over lengths beyond t and both pins.  g is vectorized over (r, z).
    """
    if t <= 0.0:
        raise ValueError("posterior requires t > 0")
    law = model.length
    if absorbed:
        if not model.is_pin(x):
            raise InferenceError("absorbed observation must sit on a pin")
        F = float(law.cdf(t))
        if F <= 0.0:
            raise InferenceError("absorption by t has zero prior probability")
        num = law.integrate_tail(0.0, lambda r: float(np.asarray(g(r, x))), b=t).value
        return num / F
    den = _mixture_sv(model, t, x, t)
    if den[1] == 0.0:
        raise InferenceError("posterior normalizer is zero")
    num = _mixture_sv(model, t, x, t,
                      gvals=lambda r: np.asarray(g(r, model.pin_points)))
    return sv_ratio(num, den)


def _smoothed_with_breaks(g: Callable, zs: np.ndarray, t: float, x: float,
                          u: float, y_breaks):
    """Per-pin Gaussian smoothing of g with quadrature panels split at the
    declared discontinuities of y -> g(., ., y)."""
    from .numerics import composite_gl
    from .random_bridge import _transition_mean_var

    def gv(r):
        out = np.empty(zs.size)
        for j, z in enumerate(zs):
            mean, var = _transition_mean_var(r, z, t, x, u)
            sig = math.sqrt(var)
            cuts = sorted((b - mean) / sig for b in y_breaks
                          if abs(b - mean) < 10.0 * sig)
            s, w = composite_gl(np.array([-10.0, *cuts, 10.0]), 48)
            dens = np.exp(-0.5 * s * s) / math.sqrt(2.0 * math.pi)
            out[j] = float(np.sum(w * dens * np.asarray(g(r, z, mean + sig * s))))
        return out

    return gv


def info_predict(model: InfoModel, t: float, x: float, absorbed: bool,
                 u: float, g: Callable, y_breaks=()) -> float:
    """E[g(length, pin, value_u) | observation x at t] for u > t.

    Same three length regimes as the general bridge: absorbed already,
    absorbing in (t, u] (value_u equals the pin), alive at u (g smoothed
    by the pin-conditional bridge transition kernel).  If g jumps in its
    value argument, list the jump locations in y_breaks so the smoothing
    quadrature can split its panels there.
    """
    if not 0.0 < t < u:
        raise ValueError("need 0 < t < u")
    law = model.length
    if absorbed:
        if not model.is_pin(x):
            raise InferenceError("absorbed observation must sit on a pin")
        F = float(law.cdf(t))
        if F <= 0.0:
            raise InferenceError("absorption by t has zero prior probability")
        num = law.integrate_tail(0.0, lambda r: float(np.asarray(g(r, x, x))), b=t).value
        return num / F
    den = _mixture_sv(model, t, x, t)
    if den[1] == 0.0:
        raise InferenceError("posterior normalizer is zero")
    zs = model.pin_points
    mid = _mixture_sv(model, t, x, t, b=u, gvals=lambda r: np.asarray(g(r, zs, zs)))
    if y_breaks:
        payload = _smoothed_with_breaks(g, zs, t, x, u, y_breaks)
    else:
        payload = _smoothed_payload(g, zs, t, x, u)
    tail = _mixture_sv(model, t, x, u, gvals=payload)
    return sv_ratio(sv_sum([mid, tail]), den)


def info_drift(model: InfoModel, s: float, x: float, absorbed: bool = False) -> float:
    """Drift of the semimartingale decomposition at (s, x).

    Zero when absorbed; otherwise the phi-weighted posterior mean of
    (pin - x) / (length - s).  The signed numerator and the positive
    denominator are integrated on a shared log scale.
    """
    if s < 0.0:
        raise ValueError("time must be nonnegative")
    if absorbed:
        return 0.0
    den = _mixture_sv(model, s, x, s)
    if den[1] == 0.0:
        raise InferenceError("drift normalizer is zero")
    num = _mixture_sv(model, s, x, s,
                      gvals=lambda r: (model.pin_points - x) / (r - s))
    value = sv_ratio(num, den)
    scale = os.environ.get(_DRIFT_SCALE_ENV)
    return value * float(scale) if scale is not None else value


@dataclass(frozen=True)
class DriftField:
    """Drift evaluator (s, x, absorbed) -> real; zero after absorption."""

    model: InfoModel

    def __call__(self, s: float, x: float, absorbed: bool = False) -> float:
        return info_drift(self.model, s, x, absorbed)


# ---------------------------------------------------------------------------
# batch field evaluation (shared by the Euler scheme and the innovation
# reconstruction; per time step, everything is computed on an x-grid and
# interpolated onto the paths)
# ---------------------------------------------------------------------------


def _node_set(law: LengthLaw, a: float, order: int):
    ta, wa = law.atoms_in(a, math.inf)
    rn, wn = law.tail_nodes(a, order=order)
    r = np.concatenate([ta, rn])
    w = np.concatenate([wa, wn])
    return r, w


def _grid_fields(model: InfoModel, s: float, delta: float, xg: np.ndarray,
                 order: int = 12):
    """Per-x-grid filter fields at time s with lookahead delta.

    Returns (drift, log continuation fraction, hazard pin-1 share): the
    continuation fraction is the posterior mass of lengths beyond
    s + delta, so one minus it is the one-step absorption probability of
    the transition kernel; the hazard share is the probability that an
    absorption inside (s, s + delta] lands on the first pin.
    """
    law = model.length
    zs, logp = model.pin_points, np.log(model.pin_probs)
    out_drift = np.zeros_like(xg)
    out_logcont = np.full_like(xg, -np.inf)
    out_hp1 = np.full_like(xg, 0.5)

    r, w = _node_set(law, s, order)
    if r.size == 0:
        return out_drift, out_logcont, out_hp1
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    lt = (_log_phi(s, r[None, :, None], xg[:, None, None], zs[None, None, :])
          + logp[None, None, :] + logw[None, :, None])  # (g, nr, 2)
    m = np.max(lt, axis=(1, 2), keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    wgt = np.exp(lt - m)
    den_i = wgt.sum(axis=1)                      # (g, 2)
    den = den_i.sum(axis=1)
    pay = (zs[None, None, :] - xg[:, None, None]) / (r[None, :, None] - s)
    num = (wgt * pay).sum(axis=(1, 2))
    ok = den > 0.0
    out_drift[ok] = num[ok] / den[ok]

    r2, w2 = _node_set(law, s + delta, order)
    if r2.size:
        with np.errstate(divide="ignore"):
            logw2 = np.log(w2)
        lt2 = (_log_phi(s, r2[None, :, None], xg[:, None, None], zs[None, None, :])
               + logp[None, None, :] + logw2[None, :, None])
        cont_i = np.exp(lt2 - m).sum(axis=1)     # (g, 2)
        near_i = np.maximum(den_i - cont_i, 0.0)
        near = near_i.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            out_logcont[ok] = np.log(cont_i.sum(axis=1)[ok] / den[ok])
        pos = ok & (near > 0.0)
        out_hp1[pos] = near_i[pos, 0] / near[pos]
    else:
        # no continuation mass at all: absorption is certain
        near_i = den_i
        pos = ok & (near_i.sum(axis=1) > 0.0)
        out_hp1[pos] = near_i[pos, 0] / near_i.sum(axis=1)[pos]
    return out_drift, out_logcont, out_hp1


DRIFT_CAP = 1e8


def euler_info_values(model: InfoModel, grid, n: int, rng: np.random.Generator,
                      mass_tol: float = 1e-6, snap_tol: float = 1e-3,
                      x_grid_points: int = 1201, node_order: int = 12):
    """Euler integration of the filter SDE dX = drift dt + dW, n paths.

    Absorption follows the transition kernel's one-step atoms: each step
    a path is absorbed with the posterior probability that the length
    falls inside the step, landing on the pin the near-term posterior
    favours.  Two deterministic clamps back the hazard up: continuation
    mass below mass_tol absorbs outright, and a path within snap_tol of
    a pin with continuation mass below sqrt(mass_tol) snaps to it.
    Returns (values, absorb_times, absorb_pins, n_capped); absorb_time
    is inf (pin nan) for paths never absorbed on the grid.
    """
    grid = check_grid(grid)
    steps = np.diff(grid)
    if steps.size == 0:
        raise ValueError("grid must contain at least two points")
    if np.max(steps) > 1e-2 + 1e-12:
        raise ValueError("Euler grid step must be at most 1e-2")
    span = max(abs(model.z1), abs(model.z2)) + 12.0
    xg = np.linspace(-span, span, x_grid_points)

    x = np.zeros(n)
    absorbed = np.zeros(n, dtype=bool)
    abs_time = np.full(n, math.inf)
    abs_pin = np.full(n, math.nan)
    out = np.zeros((n, grid.size))
    n_capped = 0

    # the drift at time 0 exactly is ill-posed for length laws with mass
    # near the origin, so the first step uses the step midpoint; every
    # later step reuses the field evaluated when detecting absorption at
    # its start time
    fields = _grid_fields(model, 0.5 * steps[0], steps[0], xg, order=node_order)
    for k, dt in enumerate(steps):
        alive = ~absorbed
        s_next = grid[k + 1]
        if np.any(alive):
            drift_g, logcont_g, hp1_g = fields
            xa = np.clip(x[alive], xg[0], xg[-1])
            # one-step absorption hazard from the kernel atoms at the
            # step start, and the pin the near-term posterior favours
            cont = np.exp(np.interp(xa, xg, logcont_g))
            hp1 = np.interp(xa, xg, hp1_g)
            hazard = 1.0 - cont
            u = rng.random(xa.size)
            near = np.minimum(np.abs(xa - model.z1), np.abs(xa - model.z2))
            clamp = (cont < mass_tol) | ((near < snap_tol)
                                         & (cont < math.sqrt(mass_tol)))
            hit = (u < hazard) | clamp
            to_z1 = hit & (u < hazard * hp1)
            to_z1 |= clamp & ~(u < hazard) & (hp1 >= 0.5)

            b = np.interp(xa, xg, drift_g)
            over = np.abs(b) > DRIFT_CAP
            n_capped += int(np.count_nonzero(over))
            b = np.clip(b, -DRIFT_CAP, DRIFT_CAP)
            noise = rng.standard_normal(xa.size)
            stepped = x[alive] + b * dt + math.sqrt(dt) * noise
            x[alive] = np.where(hit, np.where(to_z1, model.z1, model.z2), stepped)
            idx = np.flatnonzero(alive)
            newly = idx[hit]
            absorbed[newly] = True
            abs_time[newly] = s_next
            abs_pin[newly] = x[newly]
        dt_next = steps[k + 1] if k + 1 < steps.size else dt
        fields = _grid_fields(model, s_next, dt_next, xg, order=node_order)
        out[:, k + 1] = x
    return out, abs_time, abs_pin, n_capped


def innovation_increments(model: InfoModel, grid, values: np.ndarray,
                          x_grid_points: int = 1201, node_order: int = 12):
    """Innovation increments dX - drift(s, X) ds along observed paths.

    values is an (n, len(grid)) array of exactly simulated paths; the
    drift is evaluated on an x-grid per step and interpolated, with the
    observed value itself deciding absorption (a pin value means the
    drift term is zero).  Returns (increments, alive_at_start) of shape
    (n, len(grid) - 1).  Under the semimartingale decomposition the
    increments are those of a Brownian motion stopped at the hidden
    length, up to the drift-integral discretization error.
    """
    grid = np.asarray(grid, dtype=float)
    steps = np.diff(grid)
    n = values.shape[0]
    span = max(abs(model.z1), abs(model.z2)) + 12.0
    xg = np.linspace(-span, span, x_grid_points)
    incr = np.zeros((n, steps.size))
    alive_out = np.zeros((n, steps.size), dtype=bool)
    for k, dt in enumerate(steps):
        s = max(grid[k], 0.5 * dt)
        xv = values[:, k]
        alive = (xv != model.z1) & (xv != model.z2)
        drift_g, _, _ = _grid_fields(model, s, dt, xg, order=node_order)
        b = np.interp(np.clip(xv, xg[0], xg[-1]), xg, drift_g)
        b = np.clip(b, -DRIFT_CAP, DRIFT_CAP) * alive
        incr[:, k] = values[:, k + 1] - xv - b * dt
        alive_out[:, k] = alive
    return incr, alive_out


def euler_simulate_info(model: InfoModel, grid, rng: np.random.Generator,
                        **kwargs) -> PathSample:
    """One Euler path; realized fields hold the detected absorption."""
    vals, at, ap, _ = euler_info_values(model, grid, 1, rng, **kwargs)
    grid = np.asarray(grid, dtype=float)
    if math.isfinite(at[0]):
        return PathSample.build(grid, vals[0], at[0], ap[0])
    return PathSample(grid, vals[0], math.inf, math.nan, None)


# ---------------------------------------------------------------------------
# unconditional law and the right-continuity probe
# ---------------------------------------------------------------------------


def info_unconditional(model: InfoModel, u: float, g: Callable) -> float:
    """E[g(value_u)]: absorbed mixture plus the Gaussian marginal mixture."""
    if u <= 0.0:
        raise ValueError("need u > 0")
    law = model.length
    F = float(law.cdf(u))
    total = F * float(np.sum(model.pin_probs * np.asarray(g(model.pin_points))))

    for z, p in zip(model.pin_points, model.pin_probs):
        def h(r, z=z):
            mean = u * z / r
            var = u * (r - u) / r
            y = mean + math.sqrt(var) * _STD_S
            return float(np.sum(np.asarray(g(y)) * _STD_W))

        total += p * law.integrate_tail(u, h).value
    return total


@dataclass(frozen=True)
class ProbeResult:
    times: Tuple[float, ...]
    values: Tuple[float, ...]
    observed: Tuple[float, ...]
    limit_value: float
    gap: float


def right_continuity_probe(model: InfoModel, u: float, g: Callable,
                           t_star: float, ts,
                           rng: Optional[np.random.Generator] = None,
                           path: Optional[PathSample] = None) -> ProbeResult:
    """E[g(value_u) | value at t_n] along one path, for t_n decreasing to t_star.

    For t_star = 0 the length law must be bounded away from zero, and the
    limit target is the unconditional expectation; for t_star > 0 it is
    the conditional at t_star on the same path.  g takes only the later
    value and must be vectorized.
    """
    ts = np.asarray(sorted(set(float(t) for t in ts), reverse=True), dtype=float)
    if ts.size == 0 or ts[0] >= u or ts[-1] <= t_star:
        raise ValueError("probe times must lie in (t_star, u)")
    if t_star == 0.0 and not model.length.support_lower() > 0.0:
        raise ValueError("the t->0 probe needs a length law bounded away from 0")
    if t_star < 0.0 or t_star >= u:
        raise ValueError("t_star must lie in [0, u)")

    grid_times = sorted(set([0.0] + list(ts) + ([t_star] if t_star > 0.0 else [])))
    if path is None:
        if rng is None:
            raise ValueError("pass a path or an rng to simulate one")
        vals, taus, zs = random_bridge_values(model.as_random_bridge(),
                                              np.asarray(grid_times), 1, rng)
        observed = dict(zip(grid_times, vals[0]))
    else:
        lookup = dict(zip(path.grid.tolist(), path.values.tolist()))
        missing = [t for t in grid_times if t not in lookup and t > 0.0]
        if missing:
            raise ValueError(f"path does not cover probe times {missing}")
        observed = lookup

    def conditional(t: float) -> float:
        xv = observed[t]
        if model.is_pin(xv):
            return float(np.asarray(g(np.asarray([xv])))[0])
        return info_predict(model, t, xv, False, u, lambda r, z, y: g(y))

    values = tuple(conditional(t) for t in ts)
    if t_star > 0.0:
        limit = conditional(t_star)
    else:
        limit = info_unconditional(model, u, g)
    obs = tuple(observed[t] for t in ts)
    return ProbeResult(tuple(ts.tolist()), values, obs, limit,
                       abs(values[-1] - limit))
