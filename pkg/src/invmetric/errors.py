"""Exception types shared across the package."""


class InvMetricError(ValueError):
    """Base class for contract violations raised by this package."""


class DimensionError(InvMetricError):
    """Operands have incompatible dimensions."""


class DomainError(InvMetricError):
    """A point lies outside the domain an operation is defined on."""


class UnknownSuiteError(InvMetricError):
    """Requested verification suite is not registered."""
