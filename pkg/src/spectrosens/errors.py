"""Exception types shared across the package."""


class ModelError(Exception):
    """Base class for all package-specific errors."""


class InvalidParam(ModelError):
    """A physical parameter violates its allowed range."""

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or f"invalid parameter: {field}")


class ParseError(ModelError):
    """Configuration document is malformed."""


class TrustRadiusExceeded(ModelError):
    """Counting-field magnitude outside the branch-isolation trust radius."""


class GapTooSmall(ModelError):
    """Spectral gap too small for reliable dominant-branch tracking."""


class PropagationOverflow(ModelError):
    """Matrix-exponential propagation failed to scale."""


class DifferentiationUnstable(ModelError):
    """Richardson estimates of a finite-difference derivative disagree."""


class FitResidualExceeded(ModelError):
    """Two-term intensity expansion does not describe the diffusion data."""


class BranchAmbiguous(ModelError):
    """Square-root branch of the two-state eigenvalue is ill-defined."""


class DegenerateAbsorption(ModelError):
    """Absorption cross section vanishes; no optimal thickness exists."""


class DegenerateSignal(ModelError):
    """Signal derivative is numerically zero; sensitivity bound undefined."""


class SingularCovariance(ModelError):
    """Covariance matrix is not invertible."""


class QuadratureNotConverged(ModelError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class InsufficientStatistics(ModelError):
    """Monte-Carlo standard error too large relative to the analytic value."""


class StencilUnstable(ModelError):
    """Five-point derivative stencil failed its step-halving agreement test."""
