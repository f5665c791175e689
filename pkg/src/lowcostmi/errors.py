"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to reach its accuracy target."""


class SLDUndefinedError(NumericalError):
    """The symmetric logarithmic derivative equation has no solution."""


class BracketError(NumericalError):
    """A root-finding bracket does not contain a sign change."""
