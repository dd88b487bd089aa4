"""Random-length/random-pin bridge: sampling, posteriors, predictive law,
two-time conditionals and the Markov dichotomy."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import norm

from randbridge import (ContinuousPin, DiscretePins, InferenceError, LengthLaw,
                        RandomBridgeModel, non_markov_gap, posterior_tau_z,
                        predict_future, sample_random_bridge,
                        two_time_conditional)
from randbridge.gauss import rng_stream
from randbridge.random_bridge import random_bridge_values

FIG2 = RandomBridgeModel(LengthLaw.exponential(0.1),
                         DiscretePins((-4.0, 4.0), (0.3, 0.7)))
SYM = RandomBridgeModel(LengthLaw.exponential(0.1),
                        DiscretePins((-4.0, 4.0), (0.5, 0.5)))
GAUSS_EXP = RandomBridgeModel(LengthLaw.exponential(0.1), ContinuousPin.gaussian())


class TestSampling:
    def test_starts_at_zero(self):
        path = sample_random_bridge(FIG2, np.array([0.0, 1.0, 2.0]), rng_stream(1))
        assert path.values[0] == 0.0

    def test_symmetric_model_mean_zero(self):
        n = 100_000
        vals, _, _ = random_bridge_values(SYM, np.array([5.0]), n, rng_stream(2))
        v = vals[:, 0]
        assert abs(v.mean()) < 3.0 * v.std() / math.sqrt(n)

    def test_modification_identity_frequency(self):
        """P(value_t == pin) equals the length CDF at t."""
        n = 100_000
        t = 10.0
        vals, taus, zs = random_bridge_values(GAUSS_EXP, np.array([t]), n, rng_stream(3))
        freq = np.mean(vals[:, 0] == zs)
        F = 1.0 - math.exp(-1.0)
        assert abs(freq - F) < 3.0 * math.sqrt(F * (1 - F) / n)
        # absorption and {tau <= t} coincide path by path
        np.testing.assert_array_equal(vals[:, 0] == zs, taus <= t)

    def test_hidden_pair_recorded(self):
        path = sample_random_bridge(FIG2, np.linspace(0.0, 40.0, 81), rng_stream(4))
        assert path.realized_pin in (-4.0, 4.0)
        if path.absorb_index is not None:
            assert np.all(path.values[path.absorb_index:] == path.realized_pin)


class TestPosterior:
    def test_normalizes(self):
        for model in (FIG2, GAUSS_EXP):
            table = posterior_tau_z(model, 5.0, 1.2)
            assert table.expectation(lambda r, z: np.ones_like(r)) == \
                pytest.approx(1.0, abs=1e-10)

    def test_discrete_absorbed_certainty(self):
        """Observing a pin value exactly means absorption happened."""
        table = posterior_tau_z(FIG2, 10.0, 4.0)
        assert table.absorbed_flag
        assert table.prob_absorbed() == pytest.approx(1.0, abs=1e-12)
        assert table.expectation(lambda r, z: (r <= 10.0).astype(float)) == \
            pytest.approx(1.0, abs=1e-10)

    def test_discrete_nonabsorbed_excludes_past_lengths(self):
        table = posterior_tau_z(FIG2, 5.0, 1.0)
        assert not table.absorbed_flag
        assert table.prob_absorbed() == 0.0
        assert np.all(table.r_nodes > 5.0)

    def test_continuous_absorbed_probability_closed_form(self):
        """Absorbed mass f(x) F(t) over the full mixture, via nested
        quadrature assembled independently of the table."""
        t, x = 10.0, 0.7
        law, pin = GAUSS_EXP.length, GAUSS_EXP.pin
        fx = pin.pdf(x)
        F = law.cdf(t)

        def inner(r):
            # breakpoints at the integrand's narrow peak keep the adaptive
            # rule honest when r is close to t
            var = t * (r - t) / r
            mu = x * r / t
            pts = [p for p in (mu - 0.05, mu, mu + 0.05) if -8.0 < p < 8.0]
            val, _ = quad(lambda z: math.exp(-(x - t * z / r) ** 2 / (2 * var))
                          / math.sqrt(2 * math.pi * var) * pin.pdf(z),
                          -8.0, 8.0, limit=300, points=pts or None)
            return val

        D = law.integrate_tail(t, inner).value
        ref = fx * F / (fx * F + D)
        table = posterior_tau_z(GAUSS_EXP, t, x)
        est = table.expectation(lambda r, z: (r <= t).astype(float))
        assert est == pytest.approx(ref, abs=1e-8)
        assert table.prob_absorbed() == pytest.approx(ref, abs=1e-8)
        assert 0.0 < est < 1.0

    def test_discrete_pin_posterior_mean_mc(self):
        """Posterior mean of the pin against a binned MC estimate."""
        t, x, eps, n = 5.0, 1.0, 0.1, 1_000_000
        table = posterior_tau_z(FIG2, t, x)
        formula = table.expectation(lambda r, z: z)
        vals, taus, zs = random_bridge_values(FIG2, np.array([t]), n, rng_stream(5))
        sel = np.abs(vals[:, 0] - x) <= eps
        assert sel.sum() > 500
        est = zs[sel].mean()
        se = zs[sel].std() / math.sqrt(sel.sum())
        assert abs(est - formula) < 3.0 * se

    def test_zero_normalizer_raises(self):
        # two-point length, observation on a pin before any atom: absorbed
        # observation with zero prior probability
        model = RandomBridgeModel(LengthLaw.two_point(5.0, 6.0),
                                  DiscretePins((-4.0, 4.0), (0.5, 0.5)))
        with pytest.raises(InferenceError):
            posterior_tau_z(model, 1.0, 4.0)

    def test_requires_positive_time(self):
        with pytest.raises(ValueError):
            posterior_tau_z(FIG2, 0.0, 1.0)


class TestPredictFuture:
    def test_constant_g_normalizes(self):
        one = lambda r, z, y: np.ones(np.broadcast(r, z, y).shape)
        for model in (FIG2, GAUSS_EXP):
            assert predict_future(model, 2.0, 0.7, 6.0, one) == \
                pytest.approx(1.0, abs=1e-8)

    def test_symmetric_value_mean_zero(self):
        val = predict_future(SYM, 2.0, 0.0, 6.0, lambda r, z, y: y)
        assert val == pytest.approx(0.0, abs=1e-10)

    def test_mc_oracle_two_point_gaussian(self):
        """Conditional mean of the later value; all three length regimes."""
        model = RandomBridgeModel(LengthLaw.two_point(1.0, 2.0), ContinuousPin.gaussian())
        n, eps = 4_000_000, 0.1
        for t, x, u in [(1.5, 0.3, 2.5), (1.5, 0.3, 1.8)]:
            formula = predict_future(model, t, x, u, lambda r, z, y: y)
            vals, taus, zs = random_bridge_values(model, np.array([t, u]), n,
                                                  rng_stream(6))
            sel = np.abs(vals[:, 0] - x) <= eps
            assert sel.sum() > 500
            est = vals[sel, 1].mean()
            se = vals[sel, 1].std() / math.sqrt(sel.sum())
            assert abs(est - formula) < 3.0 * se + 1e-12, (t, x, u)

    def test_converges_to_posterior_as_u_drops_to_t(self):
        t, x = 2.0, 0.7
        g = lambda r, z, y: np.tanh(y) + 0.1 * z
        target = posterior_tau_z(FIG2, t, x).expectation(
            lambda r, z: np.tanh(x) + 0.1 * z)
        val = predict_future(FIG2, t, x, t + 1e-4, g)
        assert val == pytest.approx(target, abs=1e-3)


class TestTwoTimeConditional:
    def test_constant_g_normalizes(self):
        model = RandomBridgeModel(LengthLaw.two_point(1.0, 2.0), ContinuousPin.gaussian())
        val = two_time_conditional(model, 0.5, 1.5, 2.5, 0.8, 0.3,
                                   lambda y: np.ones_like(np.asarray(y)))
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_point_mass_degenerates_to_one_time(self):
        """With a deterministic length the earlier observation is vacuous."""
        model = RandomBridgeModel(LengthLaw.point_mass(4.0), ContinuousPin.gaussian())
        g = lambda y: np.tanh(y)
        lhs = two_time_conditional(model, 0.5, 1.5, 2.5, 0.8, 0.3, g)
        rhs = predict_future(model, 1.5, 0.3, 2.5, lambda r, z, y: g(y))
        assert lhs == pytest.approx(rhs, abs=1e-8)

    def test_atom_before_t1_rejected(self):
        model = RandomBridgeModel(LengthLaw.exponential(0.1), ContinuousPin.gaussian())
        with pytest.raises(ValueError):
            two_time_conditional(model, 0.5, 1.5, 2.5, 0.8, 0.3,
                                 lambda y: np.ones_like(np.asarray(y)))

    def test_discrete_pin_rejected(self):
        with pytest.raises(ValueError):
            two_time_conditional(FIG2, 0.5, 1.5, 2.5, 0.8, 0.3,
                                 lambda y: np.ones_like(np.asarray(y)))


class TestNonMarkovGap:
    """Two-point length with continuous pin: the two-time and one-time
    conditionals of the same functional disagree."""

    def brute_force_reference(self, x1, x2):
        """Independent dense midpoint-Riemann assembly of both conditionals
        for g = 1{y > 0} at (T1, T2, t1, t2, u) = (1, 2, 0.5, 1.5, 2.5).
        Cells are aligned so the indicator's jump falls on a cell edge."""
        T1, T2, t1, t2, u = 1.0, 2.0, 0.5, 1.5, 2.5
        p = lambda t, x: math.exp(-x * x / (2 * t)) / math.sqrt(2 * math.pi * t)
        n_cells = 1_200_000
        dz = 24.0 / n_cells
        z = -12.0 + (np.arange(n_cells) + 0.5) * dz
        pv = lambda t, x: np.exp(-x * x / (2 * t)) / np.sqrt(2 * math.pi * t)
        f = pv(1.0, z)
        g_z = (z > 0.0).astype(float)
        phi1 = p(t1 * (T1 - t1) / T1, x1 - t1 * x2 / T1)
        joint = pv(T2 - t2, z - x2) / pv(T2, z) * p(t1, x1) * p(t2 - t1, x2 - x1)
        J2 = float(np.sum(joint * f) * dz)
        w = pv(T2 - t2, z - x2) / pv(T2, z) * f
        K = float(np.sum(g_z * w) / np.sum(w))
        fx2 = p(1.0, x2)
        gx2 = 1.0 if x2 > 0 else 0.0
        lhs = (gx2 * fx2 * phi1 + K * J2) / (fx2 * phi1 + J2)
        marg = pv(t2 * (T2 - t2) / T2, x2 - t2 * z / T2)
        rhs = ((gx2 * fx2 + float(np.sum(g_z * marg * f) * dz))
               / (fx2 + float(np.sum(marg * f) * dz)))
        return lhs, rhs

    def test_matches_brute_force_at_canonical_point(self):
        g = lambda y: (np.asarray(y) > 0.0).astype(float)
        lhs, rhs, gap = non_markov_gap(ContinuousPin.gaussian(), 1.0, 2.0,
                                       0.5, 1.5, 2.5, 0.8, 0.3, g,
                                       z_breaks=(0.0,))
        ref_lhs, ref_rhs = self.brute_force_reference(0.8, 0.3)
        assert lhs == pytest.approx(ref_lhs, abs=1e-7)
        assert rhs == pytest.approx(ref_rhs, abs=1e-7)
        assert lhs == pytest.approx(0.824318404, abs=1e-7)
        assert rhs == pytest.approx(0.821339155, abs=1e-7)
        assert gap == pytest.approx(0.002979250, abs=1e-7)
        assert gap > 0.0

    def test_degenerate_point_mass_closes_gap(self):
        g = lambda y: (np.asarray(y) > 0.0).astype(float)
        lhs, rhs, gap = non_markov_gap(ContinuousPin.gaussian(), 1.0, 2.0,
                                       0.5, 1.5, 2.5, 0.8, 0.3, g,
                                       length=LengthLaw.point_mass(2.0),
                                       z_breaks=(0.0,))
        assert gap < 1e-8

    def test_gap_grows_with_offset_beyond_dip(self):
        """The gap as a function of |x1 - (t1/t2) x2| dips near a small
        offset and then grows; record the increasing branch."""
        g = lambda y: (np.asarray(y) > 0.0).astype(float)
        gaps = []
        for x1 in (0.8, 1.3, 1.9):
            _, _, gap = non_markov_gap(ContinuousPin.gaussian(), 1.0, 2.0,
                                       0.5, 1.5, 2.5, x1, 0.3, g,
                                       z_breaks=(0.0,))
            gaps.append(gap)
        np.testing.assert_allclose(gaps, [0.002979250, 0.029668641, 0.088842295],
                                   atol=1e-7)
        assert gaps[0] < gaps[1] < gaps[2]

    def test_ordering_validated(self):
        g = lambda y: np.asarray(y)
        with pytest.raises(ValueError):
            non_markov_gap(ContinuousPin.gaussian(), 1.0, 2.0,
                           1.2, 1.5, 2.5, 0.8, 0.3, g)
