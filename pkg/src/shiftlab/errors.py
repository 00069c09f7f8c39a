"""Exception types shared across the package."""


class ShiftLabError(Exception):
    """Base class for all package-specific errors."""


class AlmostSingular(ShiftLabError):
    """A protected pivot of the signed factorization underflowed.

    Signals that ``T - s*I`` is not almost invertible, i.e. the pair
    ``(T, s)`` lies outside the domain of the signed step.
    """


class Singular(ShiftLabError):
    """``T - s*I`` is singular within tolerance (s is an eigenvalue)."""


class NoConvergence(ShiftLabError):
    """An iterative routine exhausted its budget."""


class Breakdown(ShiftLabError):
    """Spectral reconstruction broke down (weight too close to the boundary)."""


class DuplicateEigenvalue(ShiftLabError):
    """Spectrum has a gap below tolerance; simple spectrum required."""


class CalibrationFailed(ShiftLabError):
    """No neighborhood radius above the floor satisfies the halving property."""


class StepFailure(ShiftLabError):
    """Iteration driver failed at a specific step."""

    def __init__(self, step, cause):
        super().__init__(f"step {step}: {cause}")
        self.step = step
        self.cause = cause


class WrongStrategy(ShiftLabError):
    """A diagnostic was applied to a trace from an incompatible strategy."""


class InsufficientData(ShiftLabError):
    """Not enough usable trace entries for the requested estimate."""
