"""Exception types raised across the package."""


class InvalidParameterError(ValueError):
    """A numeric argument is outside its admissible range."""


class OutOfDomainError(ValueError):
    """Evaluation point outside the domain of a path."""


class InstanceTooLargeError(ValueError):
    """Input exceeds the size cap of a quadratic-cost routine."""


class NonConvergentError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class ConfigurationError(ValueError):
    """An experiment configuration cannot be run as requested."""
