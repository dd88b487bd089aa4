"""Verification harness: conditioning primitives, reports, determinism."""

import json
import math

import numpy as np
import pytest

from randbridge import InsufficientSamplesError
from randbridge.gauss import rng_stream
from randbridge.verify import (Bin, ConditioningSpec, MCEstimate, TestReport,
                               VerifyConfig, fig1_right_model, fig2_model,
                               mc_conditional, report_json, run_suite)


class TestMcConditional:
    def test_constant_target(self):
        spec = ConditioningSpec((5.0,), (Bin("interval", 0.0, 50.0),))
        est = mc_conditional(fig2_model(), spec,
                             lambda v, ts, taus, zs: np.ones(v.shape[0]),
                             20_000, rng_stream(1))
        assert est.value == 1.0
        assert est.stderr == 0.0
        assert est.n_matched == 20_000

    def test_unconditional_absorption_frequency(self):
        """P(value_t == pin) at t = 10 for the exponential(0.1) length."""
        spec = ConditioningSpec((10.0,), (Bin("interval", 0.0, math.inf),))
        est = mc_conditional(
            fig1_right_model(), spec,
            lambda v, ts, taus, zs: (v[:, 0] == zs).astype(float),
            100_000, rng_stream(2))
        ref = 1.0 - math.exp(-1.0)
        assert abs(est.value - ref) < 3.0 * est.stderr

    def test_insufficient_samples_raises(self):
        spec = ConditioningSpec((5.0,), (Bin("interval", 30.0, 0.01),))
        with pytest.raises(InsufficientSamplesError):
            mc_conditional(fig2_model(), spec,
                           lambda v, ts, taus, zs: np.ones(v.shape[0]),
                           10_000, rng_stream(3))

    def test_atom_bin(self):
        spec = ConditioningSpec((10.0,), (Bin("atom", value=4.0),),
                                min_samples=100)
        est = mc_conditional(fig2_model(), spec,
                             lambda v, ts, taus, zs: (taus <= 10.0).astype(float),
                             50_000, rng_stream(4))
        assert est.value == 1.0  # exact-pin observation implies absorption

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ConditioningSpec((1.0,), (Bin("interval", 0.0, 0.0),))
        with pytest.raises(ValueError):
            ConditioningSpec((1.0,), (Bin("interval", 0.0, 1.0),), min_samples=10)
        with pytest.raises(ValueError):
            ConditioningSpec((1.0, 2.0), (Bin("interval", 0.0, 1.0),))


class TestReports:
    def test_tolerance_encoding(self):
        r = TestReport.from_tolerance("x", 1.0 + 5e-7, 1.0, 1e-6, 0.0)
        assert r.passed
        r2 = TestReport.from_tolerance("x", 1.0 + 2e-6, 1.0, 1e-6, 0.0)
        assert not r2.passed

    def test_reject_mode(self):
        r = TestReport.from_estimate("gap", 0.5, 0.01, 0.0, 100, 0.0,
                                     threshold=5.0, reject=True)
        assert r.passed and r.z_score == pytest.approx(50.0)
        r2 = TestReport.from_estimate("gap", 0.01, 0.01, 0.0, 100, 0.0,
                                      threshold=5.0, reject=True)
        assert not r2.passed

    def test_json_schema(self):
        cfg = VerifyConfig(seed=7, size_factor=0.2)
        reports = run_suite("right_continuity", cfg)
        doc = report_json("right_continuity", reports, cfg)
        assert set(doc) == {"suite", "theorem", "cases", "seed", "config_hash"}
        assert doc["seed"] == 7
        for case in doc["cases"]:
            assert set(case) == {"name", "estimate", "stderr", "reference",
                                 "z", "pass"}
        json.dumps(doc)  # serializable


class TestSuites:
    def test_unknown_suite(self):
        with pytest.raises(KeyError):
            run_suite("nonsense")

    def test_deterministic_reports(self):
        """Same (seed, config) gives identical reports except runtime."""
        cfg = VerifyConfig(seed=11, size_factor=0.1)
        a = run_suite("modification", cfg)
        b = run_suite("modification", cfg)
        for ra, rb in zip(a, b):
            assert ra.name == rb.name
            assert ra.estimate == rb.estimate
            assert ra.standard_error == rb.standard_error
            assert ra.z_score == rb.z_score
            assert ra.passed == rb.passed

    def test_modification_suite_passes(self):
        reports = run_suite("modification", VerifyConfig())
        assert len(reports) == 10
        assert all(r.passed for r in reports)

    def test_markov_discrete_suite_passes(self):
        reports = run_suite("markov_discrete", VerifyConfig())
        assert len(reports) == 6
        assert all(r.passed for r in reports)

    def test_right_continuity_suite_passes(self):
        reports = run_suite("right_continuity", VerifyConfig())
        assert all(r.passed for r in reports)

    def test_runtime_budget(self):
        """Each suite at default size stays within the CI budget (the
        5-minute target with 3x slack)."""
        reports = run_suite("posterior_info", VerifyConfig())
        assert all(r.runtime <= 900.0 for r in reports)
