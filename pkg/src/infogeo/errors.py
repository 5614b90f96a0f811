"""Exception types raised across the package."""


class InfogeoError(Exception):
    """Base class for all package errors."""


class DomainError(InfogeoError, ValueError):
    """Evaluation outside the valid domain or a non-finite result."""


class UnsupportedOrderError(InfogeoError, ValueError):
    """Requested derivative order exceeds what the jet engine provides."""


class IntegrationBlowupError(InfogeoError, FloatingPointError):
    """ODE integration produced a non-finite state."""


class InvalidMeasureError(InfogeoError, ValueError):
    """Quadrature weights do not form a probability measure."""


class ConditionError(InfogeoError, ValueError):
    """Matrix inversion refused because the condition number is too large."""


class ConfigError(InfogeoError, ValueError):
    """A structure or zoo entry is missing data or fails its construction gate."""


class PreconditionError(InfogeoError, ValueError):
    """Inputs do not satisfy an operation's documented precondition."""


class InvalidFamilyError(InfogeoError, ValueError):
    """Parametric family is not normalized or otherwise malformed."""


class InvalidSectionError(InfogeoError, ValueError):
    """Endomorphism field is not skew with respect to the metric."""


class UnsupportedError(InfogeoError, ValueError):
    """Operation not available for the given chart or structure."""
