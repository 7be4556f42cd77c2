"""Custom exceptions for the transceiver game solvers."""


class CdmaGameError(Exception):
    """Base exception for all solver and experiment failures."""
    pass


class InvalidInputError(CdmaGameError, ValueError):
    """Input violates a documented precondition (norms, signs, ranges)."""
    pass


class DimensionMismatchError(InvalidInputError):
    """Spreading codes, receivers or vectors do not match the scenario dimensions."""
    pass


class DegenerateEquationError(CdmaGameError):
    """The target-SINR equation has no positive solution (packet length M < 2)."""
    pass


class InfeasibleLoadError(CdmaGameError):
    """The system load is too high for the requested target SINR."""
    pass


class RootBracketError(CdmaGameError):
    """A scalar equation shows no sign change over its search bracket."""
    pass


class ConvergenceError(CdmaGameError):
    """An internal scalar iteration failed to converge."""
    pass


class TrialFailedError(CdmaGameError):
    """
    A Monte-Carlo trial raised.

    Carries the trial index and the derived seed so the failing trial can be
    replayed on its own.
    """

    def __init__(self, message: str, trial_index: int, seed: int):
        super().__init__(message, trial_index, seed)
        self.message = message
        self.trial_index = trial_index
        self.seed = seed

    def __str__(self) -> str:
        return f"{self.message} (trial={self.trial_index}, seed={self.seed})"
