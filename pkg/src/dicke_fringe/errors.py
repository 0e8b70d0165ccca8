"""Exception hierarchy shared across the package."""


class DickeFringeError(Exception):
    """Base class for all library errors."""


class InvalidGeometryError(DickeFringeError, ValueError):
    pass


class BasisMismatchError(DickeFringeError, ValueError):
    pass


class InvalidStateError(DickeFringeError, ValueError):
    pass


class DegenerateDriveError(DickeFringeError, ValueError):
    """Raised when Omega = 0: no fluorescence, correlations undefined."""


class NoPhotonError(DickeFringeError, ValueError):
    """Raised when a detection has zero probability on the given state."""


class SingularityError(DickeFringeError, ArithmeticError):
    pass


class DomainError(DickeFringeError, ValueError):
    pass
