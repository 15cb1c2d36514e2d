"""Exceptions and warnings shared across the package."""


class QuincunxError(Exception):
    """Base class for all package errors."""


class CutoffTooSmallError(QuincunxError):
    """Fock truncation cannot hold the requested state safely."""


class DispersiveRegimeError(QuincunxError):
    """Detuning too small for the dispersive approximation."""


class StepInstabilityError(QuincunxError):
    """Integrator produced trace drift beyond the stability threshold."""


class GridTooCoarseError(QuincunxError):
    """Angular grid cannot resolve the highest Fourier component."""


class GridRangeError(QuincunxError):
    """Quadrature / phase-space grid does not cover the state."""


class NonPositiveDurationError(QuincunxError):
    """A pulse duration formula returned a non-positive time."""


class SingularStepAngleError(QuincunxError):
    """Step angle at a singular point (multiple of 2*pi)."""


class InsufficientAnglesError(QuincunxError):
    """Too few local-oscillator phases for tomography."""


class InsufficientPointsError(QuincunxError):
    """Too few points for a regression."""


class NonPositiveSigmaError(QuincunxError):
    """Regression input contains non-positive sigma values."""


class NegativeProbabilityError(QuincunxError):
    """A probability distribution has negatives beyond the clip threshold."""


class ConfigError(QuincunxError):
    """Invalid or unreadable run configuration."""


class CutoffLeakageWarning(UserWarning):
    """Population near the Fock cutoff exceeded the monitor threshold."""


class DispersiveValidityWarning(UserWarning):
    """Detuning between 10g and 20g: dispersive treatment is marginal."""


class WalkBoundWarning(UserWarning):
    """A protocol bound (d-range, step count, critical photon number) is violated."""


class WrapAroundWarning(UserWarning):
    """Reference walk long enough to wrap around the cycle."""


class DeconvolutionWarning(UserWarning):
    """Thermal deconvolution admits amplification beyond 1e3."""
