"""Exception hierarchy shared by the library and the CLI."""


class LatfracError(Exception):
    """Base class; the CLI maps every subclass to exit code 2."""


class InvalidParameter(LatfracError, ValueError):
    pass


class OutOfRange(LatfracError, ValueError):
    pass


class SingularMatrix(LatfracError, ValueError):
    pass


class CannotConstruct(LatfracError, ValueError):
    pass


class BudgetExceeded(LatfracError, RuntimeError):
    pass


class SpecError(LatfracError, ValueError):
    """A parsed spec or sequence file is malformed or violates its rules."""
