"""Exception hierarchy shared by all modules."""


class BeamSinrError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BeamSinrError, ValueError):
    """An argument lies outside the admissible domain of an operation."""


class NearFieldError(DomainError):
    """A distance is below the far-field floor."""


class QuadratureError(BeamSinrError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class DegenerateModelError(BeamSinrError, ValueError):
    """The misalignment law is a point mass and has no density."""


class ParameterMismatchError(BeamSinrError, ValueError):
    """Two models that must share a beamwidth do not."""


class GridOverflowError(BeamSinrError, ValueError):
    """A result support exceeds the configured grid bounds."""


class InversionInstabilityError(BeamSinrError, RuntimeError):
    """Laplace inversion disagrees with direct convolution beyond tolerance."""


class DeploymentError(BeamSinrError, RuntimeError):
    """Rejection sampling of node positions hit its attempt cap."""


class ConfigError(BeamSinrError, ValueError):
    """A configuration value is missing, unknown or out of range."""
