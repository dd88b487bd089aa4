"""Exception types shared across the package."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge (non-integrable integrand)."""


class InferenceError(RuntimeError):
    """A posterior normalizer vanished: the observation is impossible
    under the model."""


class InsufficientSamplesError(RuntimeError):
    """A Monte-Carlo conditioning bin matched too few paths; enlarge the
    bin or the sample size."""
