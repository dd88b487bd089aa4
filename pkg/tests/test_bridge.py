"""Deterministic-length bridge: sampling, densities, drift, SDE consistency."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import ks_2samp

from randbridge import BridgeSpec, bridge_drift, bridge_fdd_pdf, sample_bridge
from randbridge.bridge import (bridge_marginal_pdf, bridge_transition_mean_var,
                               bridge_transition_pdf, bridge_values,
                               euler_bridge_values)
from randbridge.gauss import rng_stream


class TestSampling:
    def test_pin_identity_exact(self):
        grid = np.array([0.0, 0.25, 0.5, 1.0])
        path = sample_bridge(BridgeSpec(1.0, 0.0), grid, rng_stream(1))
        assert path.values[0] == 0.0
        assert path.values[-1] == 0.0

    def test_constancy_after_length(self):
        grid = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 7.0])
        path = sample_bridge(BridgeSpec(1.0, 5.0), grid, rng_stream(2))
        assert np.all(path.values[2:] == 5.0)
        assert path.absorb_index == 2

    def test_absorb_index_sentinel_beyond_grid(self):
        grid = np.array([0.0, 0.1, 0.2])
        path = sample_bridge(BridgeSpec(1.0, 5.0), grid, rng_stream(3))
        assert path.absorb_index is None

    def test_marginal_variance_band(self):
        """Var of the value at t is t(r-t)/r; sampled with N=1e5."""
        n = 100_000
        vals = bridge_values(np.full(n, 1.0), np.zeros(n), np.array([0.5]),
                             rng_stream(4))[:, 0]
        var = vals.var()
        band = 3.0 * math.sqrt(2.0 * 0.25**2 / n)
        assert abs(var - 0.25) < band

    def test_covariance_profile(self):
        """Cov(value_s, value_t) = s(r-t)/r for s <= t < r."""
        n = 100_000
        r = 2.0
        times = np.array([0.4, 0.9, 1.5])
        vals = bridge_values(np.full(n, r), np.zeros(n), times, rng_stream(5))
        for i in range(3):
            for j in range(i, 3):
                s, t = times[i], times[j]
                prod = (vals[:, i] - vals[:, i].mean()) * (vals[:, j] - vals[:, j].mean())
                est, se = prod.mean(), prod.std() / math.sqrt(n)
                assert abs(est - s * (r - t) / r) < 3.0 * se, (s, t)

    def test_grid_validation(self):
        spec = BridgeSpec(1.0, 0.0)
        with pytest.raises(ValueError):
            sample_bridge(spec, np.array([]), rng_stream(1))
        with pytest.raises(ValueError):
            sample_bridge(spec, np.array([0.0, 0.5, 0.5]), rng_stream(1))
        with pytest.raises(ValueError):
            sample_bridge(spec, np.array([0.1, 0.5]), rng_stream(1))
        with pytest.raises(ValueError):
            BridgeSpec(0.0, 1.0)


class TestMarginalPdf:
    def test_peak_value_centered(self):
        assert bridge_marginal_pdf(BridgeSpec(1.0, 0.0), 0.5, 0.0) == \
            pytest.approx(0.7978845608, abs=1e-10)

    def test_peak_value_on_mean_line(self):
        # mean is t z / r = 0.5, hit exactly
        assert bridge_marginal_pdf(BridgeSpec(1.0, 1.0), 0.5, 0.5) == \
            pytest.approx(0.7978845608, abs=1e-10)

    def test_normalization(self):
        spec = BridgeSpec(2.0, -1.0)
        val, _ = quad(lambda x: bridge_marginal_pdf(spec, 0.5, x), -8.0, 8.0, limit=200)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_degenerate_times_rejected(self):
        spec = BridgeSpec(1.0, 0.0)
        for t in (0.0, 1.0, 1.5, -0.2):
            with pytest.raises(ValueError):
                bridge_marginal_pdf(spec, t, 0.0)


class TestFddPdf:
    def test_single_time_reduces_to_marginal(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            r = rng.uniform(0.5, 4.0)
            z = rng.normal()
            t = rng.uniform(0.05, 0.95) * r
            x = rng.normal()
            spec = BridgeSpec(r, z)
            assert bridge_fdd_pdf(spec, [t], [x]) == \
                pytest.approx(bridge_marginal_pdf(spec, t, x), rel=1e-12)

    def test_chain_rule_identity(self):
        spec = BridgeSpec(1.0, 0.0)
        lhs = bridge_fdd_pdf(spec, [0.3, 0.6], [0.1, -0.2])
        rhs = (bridge_marginal_pdf(spec, 0.3, 0.1)
               * bridge_transition_pdf(spec, 0.3, 0.1, 0.6, -0.2))
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_unsorted_times_rejected(self):
        spec = BridgeSpec(1.0, 0.0)
        with pytest.raises(ValueError):
            bridge_fdd_pdf(spec, [0.6, 0.3], [0.0, 0.0])
        with pytest.raises(ValueError):
            bridge_fdd_pdf(spec, [0.3, 1.2], [0.0, 0.0])

    def test_monte_carlo_cell_frequency(self):
        """Joint density at a point vs an exact-sampler cell frequency."""
        spec = BridgeSpec(1.0, 0.0)
        times = np.array([0.3, 0.6])
        point = np.array([0.1, -0.2])
        eps = 0.05
        n = 1_000_000
        vals = bridge_values(np.full(n, spec.length), np.full(n, spec.pin),
                             times, rng_stream(6))
        inside = np.all(np.abs(vals - point) <= eps, axis=1)
        p_hat = inside.mean()
        se = math.sqrt(p_hat * (1 - p_hat) / n)
        density = bridge_fdd_pdf(spec, times, point)
        assert abs(p_hat - density * (2 * eps) ** 2) < 3.0 * se + 1e-12


class TestTransitionPdf:
    def test_two_forms_agree_at_spec_point(self):
        spec = BridgeSpec(1.0, 0.0)
        mean, var = bridge_transition_mean_var(spec, 0.25, 0.1, 0.5)
        form2 = math.exp(-((0.2 - mean) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)
        form1 = bridge_transition_pdf(spec, 0.25, 0.1, 0.5, 0.2)
        assert form1 == pytest.approx(form2, rel=1e-12)

    def test_two_forms_agree_random_sweep(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            r = rng.uniform(0.5, 5.0)
            z, x, y = rng.normal(scale=2.0, size=3)
            t = rng.uniform(0.02, 0.7) * r
            u = rng.uniform(t + 0.05 * r, 0.98 * r)
            spec = BridgeSpec(r, z)
            mean, var = bridge_transition_mean_var(spec, t, x, u)
            form2 = math.exp(-((y - mean) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)
            assert bridge_transition_pdf(spec, t, x, u, y) == pytest.approx(form2, rel=1e-12)

    def test_normalization(self):
        spec = BridgeSpec(1.0, 0.0)
        val, _ = quad(lambda y: bridge_transition_pdf(spec, 0.25, 0.1, 0.5, y),
                      -8.0, 8.0, limit=200)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_conditional_mean(self):
        spec = BridgeSpec(1.0, 2.0)
        mean, _ = bridge_transition_mean_var(spec, 0.5, 0.0, 0.75)
        assert mean == pytest.approx(1.0, rel=1e-12)
        val, _ = quad(lambda y: y * bridge_transition_pdf(spec, 0.5, 0.0, 0.75, y),
                      -8.0, 8.0, limit=200)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_chapman_kolmogorov(self):
        spec = BridgeSpec(2.0, 1.0)
        t, s, u = 0.3, 0.9, 1.6
        x, y = 0.2, 0.8
        direct = bridge_transition_pdf(spec, t, x, u, y)
        composed, _ = quad(lambda w: bridge_transition_pdf(spec, t, x, s, w)
                           * bridge_transition_pdf(spec, s, w, u, y),
                           -10.0, 10.0, limit=300)
        assert composed == pytest.approx(direct, abs=1e-6)

    def test_ordering_violations_rejected(self):
        spec = BridgeSpec(1.0, 0.0)
        for t, u in [(0.5, 0.25), (0.0, 0.5), (0.5, 1.0), (0.5, 0.5)]:
            with pytest.raises(ValueError):
                bridge_transition_pdf(spec, t, 0.0, u, 0.0)


class TestDrift:
    def test_formula(self):
        assert bridge_drift(BridgeSpec(2.0, 1.0), 1.0, 0.0) == 1.0

    def test_zero_after_length(self):
        assert bridge_drift(BridgeSpec(2.0, 1.0), 3.0, 7.0) == 0.0
        assert bridge_drift(BridgeSpec(2.0, 1.0), 2.0, 7.0) == 0.0

    def test_finite_difference_oracle(self):
        """E[dX | X_s ~ x] / dt from exact samples matches the drift."""
        spec = BridgeSpec(1.0, 0.0)
        s, x, delta, eps = 0.5, 0.4, 1e-3, 0.02
        n = 1_000_000
        vals = bridge_values(np.full(n, spec.length), np.full(n, spec.pin),
                             np.array([s, s + delta]), rng_stream(7))
        sel = np.abs(vals[:, 0] - x) <= eps
        incr = vals[sel, 1] - vals[sel, 0]
        est = incr.mean() / delta
        se = incr.std() / math.sqrt(sel.sum()) / delta
        assert bridge_drift(spec, s, x) == pytest.approx(-0.8, rel=1e-12)
        assert abs(est - (-0.8)) < 3.0 * se


class TestEulerConsistency:
    def test_ks_against_exact_sampler(self):
        """Euler integration of the drift SDE reproduces the marginal law."""
        spec = BridgeSpec(1.0, 0.3)
        n = 10_000
        euler = euler_bridge_values(spec, 0.5, 1e-3, n, rng_stream(8))
        exact = bridge_values(np.full(n, spec.length), np.full(n, spec.pin),
                              np.array([0.5]), rng_stream(9))[:, 0]
        stat = ks_2samp(euler, exact)
        assert stat.pvalue > 0.01
