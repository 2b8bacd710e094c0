"""Exception hierarchy for the reputation library."""


class SanctionError(ValueError):
    """Domain inconsistency in the inputs of an operation."""


class InvalidStrategy(SanctionError):
    pass


class BeliefInconsistency(SanctionError):
    """An observation has zero likelihood under every type in the posterior."""


class UnboundedTesting(SanctionError):
    """The testing provider only exists while k_P is finite (eps_bar > p)."""


class NumericError(ArithmeticError):
    """A closed form or solver has no meaningful value for the inputs."""


class ThresholdUndefined(NumericError):
    pass


class BoundUndefined(NumericError):
    pass


class ValueSolveError(NumericError):
    pass


class NotConverged(NumericError):
    """Raised by callers that demand convergence; carries the partial result."""

    def __init__(self, message: str, partial: object = None) -> None:
        super().__init__(message)
        self.partial = partial
