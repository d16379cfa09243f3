"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised for malformed arguments (non power-of-two lengths, bad levels, ...)."""


class AlgorithmFailure(ArithmeticError):
    """Base class for the two ways a structured DFT run can fail."""

    kind = "failure"

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class SingularMatrixError(AlgorithmFailure):
    """A square system was found numerically noninvertible."""

    kind = "singular"


class UnderdeterminedError(AlgorithmFailure):
    """The root system still had more unknowns than equations."""

    kind = "underdetermined"
