"""Exception hierarchy shared by all modules."""


class SemilinearError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SemilinearError, ValueError):
    """An argument lies outside the domain of the function."""


class NumericalDomainError(DomainError):
    """An integrand or predicate produced a non-finite value."""

    def __init__(self, msg, abscissa=None):
        super().__init__(msg)
        self.abscissa = abscissa


class KinkError(DomainError):
    """A derivative was requested at a declared kink or jump."""

    def __init__(self, msg, location=None):
        super().__init__(msg)
        self.location = location


class SpecError(SemilinearError, ValueError):
    """A diagonal or measure description is malformed."""


class PreconditionError(SemilinearError):
    """An operation was called on an object of the wrong class."""


class NotAMixtureError(SpecError):
    """Piecewise-quadratic coefficients do not come from a probability measure."""
