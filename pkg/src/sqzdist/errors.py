"""Exception hierarchy shared by all modules."""


class SqzDistError(Exception):
    """Base class for every error raised by the package."""


class ScenarioError(SqzDistError, ValueError):
    """Invalid scenario input."""


class NonUnitary(ScenarioError):
    pass


class NonGram(ScenarioError):
    pass


class BadEfficiency(ScenarioError):
    pass


class DimensionMismatch(ScenarioError):
    pass


class SeriesError(SqzDistError, ArithmeticError):
    """Misuse of the truncated series algebra."""


class CapMismatch(SeriesError):
    pass


class NonzeroConstantTerm(SeriesError):
    pass


class SingularAtOrigin(SeriesError):
    pass


class NonPositiveDeterminant(SqzDistError, ArithmeticError):
    """det(I - H_r conj(H_r)) left the positive reals; indicates a broken invariant."""


class CapacityError(SqzDistError):
    """A request exceeds a configured size limit."""


class CapacityExceeded(CapacityError):
    pass


class TooLarge(CapacityError):
    pass


class TooManyClicks(CapacityError):
    pass


class CutoffTooLarge(CapacityError):
    pass
