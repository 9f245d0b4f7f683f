class AitError(Exception):
    """Base class for precondition violations reported by this package."""


class MalformedCode(AitError):
    pass


class Infeasible(AitError):
    """A Kraft-Chaitin request cannot be served: the running sum would exceed 1."""


class BudgetExceeded(AitError):
    pass


class InvalidInput(AitError):
    pass


class InvalidWitness(AitError):
    pass


class NotFound(AitError):
    pass


class TooLarge(AitError):
    pass
