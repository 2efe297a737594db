"""Exception hierarchy shared by every module."""


class DSTError(Exception):
    """Base class for errors raised by this package."""


class InstanceError(DSTError, ValueError):
    """Bad instance input. ``kind`` is a stable machine-readable tag."""

    def __init__(self, message, kind="malformed", line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.kind = kind
        self.line = line


class QuasiBipartiteError(InstanceError):
    def __init__(self, message, line=None):
        super().__init__(message, kind="quasi_bipartite_violation", line=line)


class InfeasibleInstanceError(InstanceError):
    def __init__(self, message, unreachable=()):
        super().__init__(message, kind="unreachable_terminal")
        self.unreachable = tuple(unreachable)


class ContractError(DSTError):
    """A precondition of an operation was violated by the caller."""


class InvariantError(DSTError, AssertionError):
    """An internal algorithm invariant failed. Always a bug, never bad input."""

    def __init__(self, message, phase=None):
        if phase is not None:
            message = f"phase {phase}: {message}"
        super().__init__(message)
        self.phase = phase


class LimitError(DSTError, ValueError):
    """Input too large for an exponential-time routine."""
