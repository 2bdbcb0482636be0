"""Exception types raised across the package."""


class CharvarError(Exception):
    """Base class for all package errors."""


class InvalidElementError(CharvarError, ValueError):
    """A group element is not unit/unitary within tolerance."""


class MalformedWordError(CharvarError, ValueError):
    """A word addresses a generator outside the available slots."""


class NotInStratumError(CharvarError, ValueError):
    """A puncture triple is not traceless with product one."""


class InvalidParameterError(CharvarError, ValueError):
    pass


class InvalidMoveError(CharvarError, ValueError):
    pass


class DiagramValidationError(CharvarError, ValueError):
    pass


class ShapeError(CharvarError, ValueError):
    pass


class SmoothnessConditionError(CharvarError, ValueError):
    pass


class OutOfNeighborhoodError(CharvarError, ValueError):
    pass


class UnsupportedCompositionError(CharvarError, ValueError):
    pass


class ConfigurationError(CharvarError, RuntimeError):
    pass
