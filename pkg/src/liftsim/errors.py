"""Exception types shared across the package."""


class LiftsimError(Exception):
    """Base class for all liftsim errors."""


class InputError(LiftsimError, ValueError):
    """Malformed or inconsistent user input (dimensions, schemas, domains)."""


class CapacityError(LiftsimError):
    """Problem size exceeds the supported desk scale."""


class EmptySetError(LiftsimError):
    """An operation required a nonempty set."""


class UnboundedSetError(LiftsimError):
    """An operation required a bounded set."""


class NumericalCertificateError(LiftsimError):
    """A solver-reported certificate failed its independent arithmetic re-check."""
