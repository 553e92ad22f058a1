"""Exception hierarchy shared by every hopbot module."""


class HopbotError(Exception):
    """Base class for all errors raised by hopbot."""


class ValidationError(HopbotError, ValueError):
    """Inputs violate a documented precondition or invariant.

    Args:
        problems: One human-readable line per violated constraint. A single
            string is accepted as a one-item list.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class DomainError(HopbotError, ValueError):
    """A point lies outside the domain of a function (inside an obstacle,
    behind a camera, ...)."""


class InfiniteRangeError(DomainError):
    """Stereo rays are parallel, so the range is unbounded."""


class StepSizeError(HopbotError, ValueError):
    """The integration step is too coarse for the requested accuracy."""


class NumericalError(HopbotError, ArithmeticError):
    """A NaN or Inf appeared in the named state field."""

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or f"non-finite value in {field}")


class BrokenChainError(HopbotError, ValueError):
    """Two adjacent relay nodes are farther apart than the radio range."""

    def __init__(self, index, gap, comm_range):
        self.index = index
        self.gap = gap
        self.comm_range = comm_range
        super().__init__(
            f"gap between node {index} and node {index + 1} is {gap:.3f} m, "
            f"exceeds comm range {comm_range:.3f} m"
        )


class ConfigError(HopbotError):
    """A scenario file could not be parsed or has the wrong shape."""
