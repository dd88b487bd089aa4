"""Brownian bridges with random length and pinning point.

Simulation, closed-form densities and Bayesian filtering for bridges
whose pin time and pin level are random, including the two-point-pinned
information process, plus a Monte-Carlo harness that independently
checks every closed form.
"""

from .bridge import (BridgeSpec, PathSample, bridge_drift, bridge_fdd_pdf,
                     bridge_marginal_pdf, bridge_transition_pdf, sample_bridge)
from .errors import InferenceError, InsufficientSamplesError, QuadratureError
from .gauss import GaussParams, gauss_logpdf, gauss_pdf, rng_stream
from .info import (DriftField, InfoModel, MixedDensity, euler_simulate_info,
                   info_drift, info_posterior, info_predict, info_transition,
                   phi_weight, right_continuity_probe)
from .laws import (ContinuousPin, DiscretePins, LengthLaw, PinLaw,
                   integrate_tail, length_cdf, sample_length, sample_pin)
from .random_bridge import (PosteriorTable, RandomBridgeModel, non_markov_gap,
                            posterior_tau_z, predict_future,
                            sample_random_bridge, two_time_conditional)

__all__ = [
    "BridgeSpec", "ContinuousPin", "DiscretePins", "DriftField", "GaussParams",
    "InferenceError", "InfoModel", "InsufficientSamplesError", "LengthLaw",
    "MixedDensity", "PathSample", "PinLaw", "PosteriorTable", "QuadratureError",
    "RandomBridgeModel", "bridge_drift", "bridge_fdd_pdf", "bridge_marginal_pdf",
    "bridge_transition_pdf", "euler_simulate_info", "gauss_logpdf", "gauss_pdf",
    "info_drift", "info_posterior", "info_predict", "info_transition",
    "integrate_tail", "length_cdf", "non_markov_gap", "phi_weight",
    "posterior_tau_z", "predict_future", "rng_stream", "sample_bridge",
    "sample_length", "sample_pin", "sample_random_bridge",
    "two_time_conditional",
]
