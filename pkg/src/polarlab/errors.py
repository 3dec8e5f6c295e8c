"""Exception hierarchy shared by every module."""


class PolarLabError(Exception):
    """Base class for library errors."""


class DomainError(PolarLabError, ValueError):
    """Argument outside the domain of an operation."""


class CapacityError(PolarLabError):
    """Requested work exceeds the enumeration budget."""


class KernelError(PolarLabError, ValueError):
    """Kernel matrix is non-square or singular over GF(2)."""


class LookupFailure(PolarLabError, KeyError):
    """No kernel is available for a bundle."""
