"""Laws of the random length and the pinning point, with tail quadrature.

A :class:`LengthLaw` is a finite list of atoms plus an optional absolutely
continuous part, which covers every length distribution used here:
exponential (figures), two-point (the non-Markov construction), point
masses (degeneracy checks), uniform and tabulated densities (CLI).  The
law owns the quadrature used for every integral of the form
``sum_{T_j > a} w_j h(T_j) + int_(a,cutoff) h(r) density(r) dr``;
the continuous part is integrated after the substitution ``r = a + v**2``
so integrands with an ``(r - a)**-0.5`` spike at the left endpoint stay
well-posed.

Pinning-point laws are either :class:`DiscretePins` or a
:class:`ContinuousPin` carrying a density, a sampler and a declared
support interval.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy import stats
from scipy.integrate import IntegrationWarning, quad

from .errors import QuadratureError
from .numerics import ZERO_SV, composite_gl, sv_sum

_ATOL_MASS = 1e-12

# Panel edges as fractions of the sqrt-substituted radius; the tight
# spacing near zero resolves the (r - a)^(-1/2) spike that phi-weights
# develop when the observed value sits exactly on a pin.
_V_EDGES = np.array(
    [0.0, 1e-5, 1e-4, 1e-3, 1e-2, 0.04, 0.12, 0.28, 0.5, 0.75, 1.0]
)


class TailIntegral(NamedTuple):
    value: float
    error: float


@dataclass(frozen=True)
class PiecewiseLinearDensity:
    """Normalized piecewise-linear density on [ts[0], ts[-1]] ("table" law)."""

    ts: tuple
    ds: tuple

    @classmethod
    def build(cls, ts, ds) -> "PiecewiseLinearDensity":
        ts = np.asarray(ts, dtype=float)
        ds = np.asarray(ds, dtype=float)
        if ts.ndim != 1 or ts.size < 2 or np.any(np.diff(ts) <= 0):
            raise ValueError("table abscissae must be strictly increasing")
        if np.any(ds < 0.0):
            raise ValueError("table density values must be nonnegative")
        total = np.trapezoid(ds, ts)
        if total <= 0.0:
            raise ValueError("table density has zero mass")
        return cls(tuple(ts), tuple(ds / total))

    def _arrays(self):
        return np.asarray(self.ts), np.asarray(self.ds)

    def pdf(self, r):
        ts, ds = self._arrays()
        return np.interp(r, ts, ds, left=0.0, right=0.0)

    def logpdf(self, r):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(r))

    def _cum(self):
        ts, ds = self._arrays()
        seg = 0.5 * (ds[1:] + ds[:-1]) * np.diff(ts)
        return np.concatenate([[0.0], np.cumsum(seg)])

    def cdf(self, r):
        ts, ds = self._arrays()
        cum = self._cum()
        r = np.asarray(r, dtype=float)
        idx = np.clip(np.searchsorted(ts, r, side="right") - 1, 0, ts.size - 2)
        dt = np.clip(r - ts[idx], 0.0, np.diff(ts)[idx])
        slope = (ds[idx + 1] - ds[idx]) / np.diff(ts)[idx]
        out = cum[idx] + ds[idx] * dt + 0.5 * slope * dt * dt
        out = np.where(r <= ts[0], 0.0, np.where(r >= ts[-1], 1.0, out))
        return float(out) if out.ndim == 0 else out

    def ppf(self, q):
        ts, ds = self._arrays()
        cum = self._cum()
        q = np.asarray(q, dtype=float)
        idx = np.clip(np.searchsorted(cum, q, side="right") - 1, 0, ts.size - 2)
        slope = (ds[idx + 1] - ds[idx]) / np.diff(ts)[idx]
        rem = q - cum[idx]
        d0 = ds[idx]
        with np.errstate(divide="ignore", invalid="ignore"):
            lin = rem / d0
            disc = np.sqrt(np.maximum(d0 * d0 + 2.0 * slope * rem, 0.0))
            quadr = (disc - d0) / slope
        dt = np.where(np.abs(slope) < 1e-300, lin, quadr)
        dt = np.nan_to_num(dt, nan=0.0)
        out = ts[idx] + np.clip(dt, 0.0, np.diff(ts)[idx])
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ContinuousPart:
    """Absolutely continuous component of a length law.

    `breaks` lists interior points where the density is not smooth, so
    quadrature panels can be aligned with them.
    """

    mass: float
    dist: object  # pdf/logpdf/cdf/ppf duck type (scipy frozen or table)
    support: Tuple[float, float]
    breaks: Tuple[float, ...] = ()


@dataclass(frozen=True)
class LengthLaw:
    """Distribution of the random length: atoms plus a continuous part."""

    atoms: Tuple[Tuple[float, float], ...] = ()
    cont: Optional[ContinuousPart] = None
    tail_cutoff: float = 1.0 - 1e-10

    def __post_init__(self) -> None:
        total = 0.0
        for t, w in self.atoms:
            if t <= 0.0:
                raise ValueError("length atoms must be strictly positive times")
            if w < 0.0:
                raise ValueError("atom weights must be nonnegative")
            total += w
        if self.cont is not None:
            if self.cont.mass < 0.0:
                raise ValueError("continuous mass must be nonnegative")
            if self.cont.support[0] < 0.0:
                raise ValueError("length support must lie in (0, inf)")
            total += self.cont.mass
        if abs(total - 1.0) > _ATOL_MASS:
            raise ValueError(f"length-law mass is {total}, expected 1")

    # -- named constructors -------------------------------------------------

    @classmethod
    def exponential(cls, rate: float, shift: float = 0.0) -> "LengthLaw":
        if rate <= 0.0:
            raise ValueError("exponential rate must be positive")
        dist = stats.expon(loc=shift, scale=1.0 / rate)
        return cls(cont=ContinuousPart(1.0, dist, (shift, math.inf)))

    @classmethod
    def two_point(cls, t1: float, t2: float, p1: float = 0.5) -> "LengthLaw":
        if not 0.0 <= p1 <= 1.0:
            raise ValueError("two_point weight must be a probability")
        return cls(atoms=((t1, p1), (t2, 1.0 - p1)))

    @classmethod
    def point_mass(cls, t: float) -> "LengthLaw":
        return cls(atoms=((t, 1.0),))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "LengthLaw":
        if not 0.0 <= lo < hi:
            raise ValueError("uniform support must satisfy 0 <= lo < hi")
        dist = stats.uniform(loc=lo, scale=hi - lo)
        return cls(cont=ContinuousPart(1.0, dist, (lo, hi)))

    @classmethod
    def table(cls, ts, ds) -> "LengthLaw":
        dens = PiecewiseLinearDensity.build(ts, ds)
        if dens.ts[0] < 0.0:
            raise ValueError("table support must lie in (0, inf)")
        return cls(cont=ContinuousPart(1.0, dens, (dens.ts[0], dens.ts[-1]),
                                       breaks=tuple(dens.ts[1:-1])))

    # -- basic queries -------------------------------------------------------

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for tj, wj in self.atoms:
            out = out + wj * (t >= tj)
        if self.cont is not None:
            out = out + self.cont.mass * self.cont.dist.cdf(t)
        return float(out) if out.ndim == 0 else out

    def upper(self) -> float:
        """Truncation point: everything beyond carries < 1 - tail_cutoff mass."""
        hi = max((t for t, _ in self.atoms), default=0.0)
        if self.cont is not None:
            b = self.cont.dist.ppf(self.tail_cutoff)
            hi = max(hi, min(b, self.cont.support[1]))
        return hi

    def support_lower(self) -> float:
        lo = math.inf
        if self.atoms:
            lo = min(t for t, w in self.atoms if w > 0.0)
        if self.cont is not None and self.cont.mass > 0.0:
            lo = min(lo, self.cont.support[0])
        return lo

    def atoms_in(self, a: float, b: float = math.inf):
        ts = [t for t, w in self.atoms if a < t <= b and w > 0.0]
        ws = [w for t, w in self.atoms if a < t <= b and w > 0.0]
        return np.asarray(ts), np.asarray(ws)

    # -- sampling ------------------------------------------------------------

    def sample(self, rng: np.random.Generator, n: Optional[int] = None):
        m = 1 if n is None else int(n)
        u_comp = rng.random(m)
        u_val = rng.random(m)
        out = np.empty(m)
        edges = np.cumsum([w for _, w in self.atoms])
        idx = np.searchsorted(edges, u_comp, side="right")
        for j, (tj, _) in enumerate(self.atoms):
            out[idx == j] = tj
        cont_mask = idx >= len(self.atoms)
        if np.any(cont_mask):
            if self.cont is None:
                # total atom mass is 1 up to 1e-12; collapse the sliver
                out[cont_mask] = self.atoms[-1][0]
            else:
                out[cont_mask] = self.cont.dist.ppf(u_val[cont_mask])
        return float(out[0]) if n is None else out

    # -- quadrature ----------------------------------------------------------

    def _im(self, a: float, b: float):
        """Integration window of the continuous part clipped to (a, b)."""
        if self.cont is None or self.cont.mass == 0.0:
            return None
        lo = max(a, self.cont.support[0])
        hi = min(b, self.upper())
        if hi <= lo:
            return None
        return lo, hi

    def _v_edges(self, a: float, lo: float, hi: float) -> np.ndarray:
        """Panel edges in the substituted variable v = sqrt(r - a),
        aligned with any density breakpoints inside (lo, hi)."""
        v0 = math.sqrt(lo - a) if lo > a else 0.0
        v1 = math.sqrt(hi - a)
        edges = v0 + (v1 - v0) * _V_EDGES
        brk = [math.sqrt(p - a) for p in self.cont.breaks if lo < p < hi]
        if brk:
            edges = np.unique(np.concatenate([edges, brk]))
        return edges

    def integrate_tail(self, a: float, h: Callable, b: float = math.inf) -> TailIntegral:
        """``sum_{a < T_j <= b} w_j h(T_j) + int h dP_cont`` with error estimate.

        Adaptive quadrature after the r = a + v**2 substitution; target
        relative error 1e-8, the achieved estimate is reported alongside.
        Raises :class:`QuadratureError` when the integral fails to converge.
        """
        ts, ws = self.atoms_in(a, b)
        val = float(sum(w * h(t) for t, w in zip(ts, ws)))
        err = 0.0
        win = self._im(a, b)
        if win is not None:
            lo, hi = win
            pdf, mass = self.cont.dist.pdf, self.cont.mass

            def f(v):
                if v <= 0.0:
                    return 0.0
                r = a + v * v
                return 2.0 * v * h(r) * pdf(r) * mass

            edges = self._v_edges(a, lo, hi)
            v0, v1 = edges[0], edges[-1]
            pts = list(edges[1:-1])
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", IntegrationWarning)
                cv, ce = quad(f, v0, v1, points=pts, limit=300,
                              epsabs=1e-14, epsrel=1e-10)
            bad = [w for w in caught if issubclass(w.category, IntegrationWarning)]
            if bad and not (abs(ce) <= 1e-3 * max(abs(cv) + abs(val), 1e-300)):
                raise QuadratureError(
                    f"tail integral did not converge on ({a}, {b}): "
                    f"value~{cv:.6g}, error~{ce:.2g}; {bad[0].message}"
                )
            val += cv
            err += ce
        return TailIntegral(val, err)

    def tail_nodes(self, a: float, b: float = math.inf, order: int = 24):
        """Fixed quadrature nodes/weights for the continuous part on (a, b).

        Weights include the density, the sqrt-substitution Jacobian and the
        continuous mass, so ``sum(w * h(r))`` approximates the continuous
        contribution to a tail integral.  Atoms are not included.
        """
        win = self._im(a, b)
        if win is None:
            return np.empty(0), np.empty(0)
        lo, hi = win
        v, w = composite_gl(self._v_edges(a, lo, hi), order)
        r = a + v * v
        wr = w * 2.0 * v * self.cont.dist.pdf(r) * self.cont.mass
        return r, wr

    def scaled_integral(self, a: float, b: float, log_h: Callable,
                        payload: Optional[Callable] = None):
        """(log_scale, mantissa) of ``int_(a,b] payload(r) e^{log_h(r)} dP``.

        log_h must be vectorized over r; payload may change sign.  The
        continuous part is integrated with the sqrt substitution after
        subtracting the probed maximum of the log integrand, so weights
        spanning hundreds of orders of magnitude cannot overflow.
        """
        terms = []
        ts, ws = self.atoms_in(a, b)
        if ts.size:
            lh = np.asarray(log_h(ts), dtype=float)
            pay = np.ones_like(ts) if payload is None else np.asarray(payload(ts), dtype=float)
            for t, w, l, p in zip(ts, ws, lh, pay):
                if w > 0.0 and np.isfinite(l):
                    terms.append((l + math.log(w), float(p)))
        win = self._im(a, b)
        if win is not None:
            lo, hi = win
            edges = self._v_edges(a, lo, hi)
            v0, v1 = edges[0], edges[-1]
            logpdf, logmass = self.cont.dist.logpdf, math.log(self.cont.mass)

            vp = np.unique(np.concatenate([
                edges,
                v0 + (v1 - v0) * np.geomspace(1e-8, 1.0, 41),
                np.linspace(v0, v1, 41),
            ]))
            vp = vp[vp > v0] if v0 == 0.0 else vp[vp >= v0]
            with np.errstate(divide="ignore", invalid="ignore"):
                rp = a + vp * vp
                lt = (np.asarray(log_h(rp), dtype=float) + logpdf(rp)
                      + np.log(2.0 * vp) + logmass)
            lt = lt[np.isfinite(lt)]
            if lt.size:
                m = float(np.max(lt))
                seen = {"max": m}

                def f(v, scale):
                    if v <= 0.0:
                        return 0.0
                    r = a + v * v
                    le = log_h(np.asarray([r]))[0] + logpdf(r) + math.log(2.0 * v) + logmass
                    if not np.isfinite(le):
                        return 0.0
                    seen["max"] = max(seen["max"], le)
                    val = math.exp(min(le - scale, 700.0))
                    if payload is not None:
                        val *= payload(r)
                    return val

                pts = list(edges[1:-1])
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", IntegrationWarning)
                    cv, _ = quad(f, v0, v1, args=(m,), points=pts, limit=300,
                                 epsabs=1e-14, epsrel=1e-10)
                    if seen["max"] - m > 30.0:
                        # the probe missed the true peak by a lot; rescale
                        # to the observed maximum and integrate again
                        m = seen["max"]
                        cv, _ = quad(f, v0, v1, args=(m,), points=pts,
                                     limit=300, epsabs=1e-14, epsrel=1e-10)
                terms.append((m, float(cv)))
        return sv_sum(terms)


# ---------------------------------------------------------------------------
# pinning-point laws
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscretePins:
    """Discrete pinning-point law on distinct points z_i with weights p_i."""

    points: Tuple[float, ...]
    probs: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.points) != len(self.probs) or not self.points:
            raise ValueError("points and probs must be equal-length, nonempty")
        if len(set(self.points)) != len(self.points):
            raise ValueError("pin points must be distinct")
        if any(p < 0.0 for p in self.probs):
            raise ValueError("pin probabilities must be nonnegative")
        if abs(sum(self.probs) - 1.0) > _ATOL_MASS:
            raise ValueError("pin probabilities must sum to 1")

    def sample(self, rng: np.random.Generator, n: Optional[int] = None):
        m = 1 if n is None else int(n)
        edges = np.cumsum(self.probs)
        idx = np.searchsorted(edges, rng.random(m), side="right")
        idx = np.minimum(idx, len(self.points) - 1)
        out = np.asarray(self.points)[idx]
        return float(out[0]) if n is None else out

    def index_of(self, x: float) -> int:
        """Index of the pin bit-exactly equal to x, or -1."""
        for i, z in enumerate(self.points):
            if x == z:
                return i
        return -1


@dataclass(frozen=True)
class ContinuousPin:
    """Absolutely continuous pinning-point law with declared support."""

    dist: object
    support: Tuple[float, float]

    def __post_init__(self) -> None:
        mass, _ = quad(self.dist.pdf, self.support[0], self.support[1], limit=200)
        if abs(mass - 1.0) > 1e-6:
            raise ValueError(f"pin density mass over support is {mass}, expected 1")

    @classmethod
    def gaussian(cls, mean: float = 0.0, std: float = 1.0) -> "ContinuousPin":
        # +-8 sigma holds all but ~1e-15 of the mass, below every tolerance
        return cls(stats.norm(mean, std), (mean - 8.0 * std, mean + 8.0 * std))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "ContinuousPin":
        return cls(stats.uniform(lo, hi - lo), (lo, hi))

    def pdf(self, z):
        return self.dist.pdf(z)

    def logpdf(self, z):
        return self.dist.logpdf(z)

    def sample(self, rng: np.random.Generator, n: Optional[int] = None):
        m = 1 if n is None else int(n)
        out = self.dist.ppf(rng.random(m))
        return float(out[0]) if n is None else out

    def quad_nodes(self, n: int = 200):
        from .numerics import gl_nodes

        return gl_nodes(self.support[0], self.support[1], n)


PinLaw = Union[DiscretePins, ContinuousPin]


# ---------------------------------------------------------------------------
# module-level operation wrappers
# ---------------------------------------------------------------------------


def length_cdf(law: LengthLaw, t) -> float:
    """P(length <= t)."""
    return law.cdf(t)


def integrate_tail(law: LengthLaw, a: float, h: Callable) -> TailIntegral:
    """Integral of h over (a, inf) against the length law."""
    return law.integrate_tail(a, h)


def sample_length(law: LengthLaw, rng: np.random.Generator, n: Optional[int] = None):
    return law.sample(rng, n)


def sample_pin(law: PinLaw, rng: np.random.Generator, n: Optional[int] = None):
    return law.sample(rng, n)
