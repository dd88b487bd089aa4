"""Brownian bridge with deterministic length and pinning point.

The process starts at zero, equals the pin exactly at the length and is
held constant afterwards.  Path sampling uses the explicit pathwise
construction (simulate the driving Brownian motion on the grid together
with the pin time, then apply the bridge transform), which is exact in
distribution at the grid points and hits the pin bit-exactly; the SDE
form with the singular drift is provided separately for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .gauss import gauss_logpdf, gauss_pdf


@dataclass(frozen=True)
class BridgeSpec:
    """Length r > 0 and pin level z of a deterministic bridge."""

    length: float
    pin: float

    def __post_init__(self) -> None:
        if not self.length > 0.0:
            raise ValueError("bridge length must be strictly positive")


@dataclass(frozen=True)
class PathSample:
    """One simulated trajectory on a fixed time grid.

    values[k] equals realized_pin exactly for every k >= absorb_index;
    absorb_index is None when the grid ends before the realized length.
    For filter-driven simulations the realized fields hold the *detected*
    absorption (length = inf, pin = nan when none was detected).
    """

    grid: np.ndarray
    values: np.ndarray
    realized_length: float
    realized_pin: float
    absorb_index: Optional[int]

    @classmethod
    def build(cls, grid, values, length, pin) -> "PathSample":
        grid = np.asarray(grid, dtype=float)
        idx = int(np.searchsorted(grid, length, side="left"))
        return cls(grid, np.asarray(values, dtype=float), float(length),
                   float(pin), idx if idx < grid.size else None)


def check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("time grid must be a nonempty 1-d sequence")
    if grid[0] != 0.0:
        raise ValueError("time grid must start at 0")
    if grid.size > 1 and np.any(np.diff(grid) <= 0.0):
        raise ValueError("time grid must be strictly increasing")
    return grid


def bridge_values(lengths, pins, times, rng: np.random.Generator) -> np.ndarray:
    """Exact bridge values at `times` for n paths with given lengths/pins.

    lengths, pins: arrays of shape (n,); times: increasing, times[0] >= 0.
    Returns an (n, k) array.  The driving motion is simulated on the
    per-path grid {t_j ^ r} together with r itself, so values at times
    past the length equal the pin bit-exactly.
    """
    lengths = np.atleast_1d(np.asarray(lengths, dtype=float))
    pins = np.atleast_1d(np.asarray(pins, dtype=float))
    times = np.asarray(times, dtype=float)
    n, k = lengths.size, times.size
    s = np.minimum(times[None, :], lengths[:, None])          # (n, k)
    aug = np.concatenate([s, lengths[:, None]], axis=1)        # append r
    dt = np.diff(np.concatenate([np.zeros((n, 1)), aug], axis=1), axis=1)
    incr = rng.standard_normal((n, k + 1)) * np.sqrt(dt)
    w = np.cumsum(incr, axis=1)
    ratio = s / lengths[:, None]
    return w[:, :k] - ratio * w[:, [k]] + ratio * pins[:, None]


def sample_bridge(spec: BridgeSpec, grid, rng: np.random.Generator) -> PathSample:
    """One exact path of the bridge on the given grid."""
    grid = check_grid(grid)
    vals = bridge_values(np.array([spec.length]), np.array([spec.pin]), grid, rng)[0]
    return PathSample.build(grid, vals, spec.length, spec.pin)


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------


def _check_interior(spec: BridgeSpec, t: float) -> None:
    if not 0.0 < t < spec.length:
        raise ValueError(
            f"time {t} outside (0, {spec.length}): the marginal is degenerate there"
        )


def bridge_marginal_logpdf(spec: BridgeSpec, t: float, x):
    _check_interior(spec, t)
    r, z = spec.length, spec.pin
    return gauss_logpdf(t * (r - t) / r, x, t * z / r)


def bridge_marginal_pdf(spec: BridgeSpec, t: float, x):
    """Density of the bridge value at time t in (0, r)."""
    _check_interior(spec, t)
    r, z = spec.length, spec.pin
    return gauss_pdf(t * (r - t) / r, x, t * z / r)


def bridge_fdd_logpdf(spec: BridgeSpec, times, xs):
    times = np.asarray(times, dtype=float)
    xs = np.asarray(xs, dtype=float)
    if times.size != xs.size or times.size == 0:
        raise ValueError("times and xs must be equal-length and nonempty")
    if np.any(np.diff(times) <= 0.0):
        raise ValueError("times must be strictly increasing")
    if not (0.0 < times[0] and times[-1] < spec.length):
        raise ValueError("times must lie strictly inside (0, length)")
    r, z = spec.length, spec.pin
    dt = np.diff(np.concatenate([[0.0], times]))
    dx = np.diff(np.concatenate([[0.0], xs]))
    out = gauss_logpdf(r - times[-1], z - xs[-1]) - gauss_logpdf(r, z)
    out += np.sum(gauss_logpdf(dt, dx))
    return float(out)


def bridge_fdd_pdf(spec: BridgeSpec, times, xs) -> float:
    """Joint density of bridge values at strictly increasing times < length."""
    return math.exp(bridge_fdd_logpdf(spec, times, xs))


def _check_transition_times(spec: BridgeSpec, t: float, u: float) -> None:
    if not 0.0 < t < u < spec.length:
        raise ValueError(f"need 0 < t < u < length, got t={t}, u={u}, r={spec.length}")


def bridge_transition_logpdf(spec: BridgeSpec, t: float, x, u: float, y):
    _check_transition_times(spec, t, u)
    r, z = spec.length, spec.pin
    return (gauss_logpdf(r - u, z - np.asarray(y)) + gauss_logpdf(u - t, np.asarray(y) - x)
            - gauss_logpdf(r - t, z - x))


def bridge_transition_pdf(spec: BridgeSpec, t: float, x, u: float, y):
    """Transition density x at t -> y at u, for 0 < t < u < length."""
    out = np.exp(bridge_transition_logpdf(spec, t, x, u, y))
    return float(out) if np.ndim(out) == 0 else out


def bridge_transition_mean_var(spec: BridgeSpec, t: float, x, u: float):
    """Gaussian (mean, variance) form of the same transition law."""
    _check_transition_times(spec, t, u)
    r, z = spec.length, spec.pin
    mean = (r - u) / (r - t) * x + (u - t) / (r - t) * z
    var = (r - u) * (u - t) / (r - t)
    return mean, var


def bridge_drift(spec: BridgeSpec, s: float, x):
    """Drift (pin - x) / (length - s) before the length, 0 afterwards."""
    if s < 0.0:
        raise ValueError("time must be nonnegative")
    if s >= spec.length:
        return 0.0
    return (spec.pin - x) / (spec.length - s)


# ---------------------------------------------------------------------------
# Euler cross-check simulator
# ---------------------------------------------------------------------------

DRIFT_CAP = 1e8
PIN_SNAP = 1e-9


def euler_bridge_values(spec: BridgeSpec, t_end: float, dt: float, n: int,
                        rng: np.random.Generator) -> np.ndarray:
    """Euler integration of dX = drift dt + dW up to t_end, n paths.

    The drift is singular as s approaches the length, so its magnitude is
    capped at 1e8 and X snaps to the pin once length - s < 1e-9; past the
    length the paths are held at the pin.
    """
    if dt <= 0.0 or t_end < 0.0:
        raise ValueError("need dt > 0 and t_end >= 0")
    r, z = spec.length, spec.pin
    x = np.zeros(n)
    s = 0.0
    while s < t_end - 1e-15:
        step = min(dt, t_end - s)
        if s >= r:
            x[:] = z
            break
        if r - s < PIN_SNAP:
            x[:] = z
            s += step
            continue
        drift = np.clip((z - x) / (r - s), -DRIFT_CAP, DRIFT_CAP)
        # do not integrate the singular drift past the pin time
        eff = min(step, r - s)
        x = x + drift * eff + math.sqrt(step) * rng.standard_normal(n)
        s += step
    if t_end >= r:
        x[:] = z
    return x
