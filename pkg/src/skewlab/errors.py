"""Exception taxonomy for the lab.

Every failure mode that callers are expected to branch on gets its own class;
anything else surfaces as a plain ValueError from the offending call.
"""


class SkewLabError(Exception):
    """Base class for all lab-specific errors."""


class GridMismatch(SkewLabError):
    """Two profiles (or a profile and an operator) live on different grids."""


class DimensionMismatch(SkewLabError):
    """A group element or operator was applied to the wrong spatial dimension."""


class GroupMismatch(SkewLabError):
    """Attempt to compose elements of different transformation groups."""


class CFLViolation(SkewLabError):
    """Step-size constraints of the order-preserving scheme are violated."""


class NonFiniteState(SkewLabError):
    """A trajectory produced NaN or Inf values."""


class EmptyReturnSet(SkewLabError):
    """No base return times below the horizon at the requested tolerance."""


class NoCrossing(SkewLabError):
    """A profile never crosses the requested level."""


class NotStable(SkewLabError):
    """Stability probe: even the smallest tested perturbation escapes."""


class BracketFailure(SkewLabError):
    """Scalar minimization bracket does not contain an interior minimum."""


class NoConvergence(SkewLabError):
    """An iterative estimate failed to settle within its tolerance."""


class UndecidedEstimate(SkewLabError):
    """An omega-limit estimate without converged status was used where a
    converged one is required."""


class HypothesisViolated(SkewLabError):
    """A structural hypothesis a verifier relies on fails on the given data.

    Carries enough context to report where it failed.
    """

    def __init__(self, message: str, where: object = None):
        super().__init__(message)
        self.where = where


class TrappingViolated(SkewLabError):
    """A trajectory escaped a sub/supersolution trap."""


class SymmetryFlagMissing(SkewLabError):
    """A verifier needing a symmetric reaction term got one without the flag."""


class ConfigInvalid(SkewLabError):
    """Experiment configuration rejected; carries JSON-pointer style paths."""

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = list(problems)
        lines = "; ".join(f"{path}: {msg}" for path, msg in self.problems)
        super().__init__(f"invalid config: {lines}")


class LockHeld(SkewLabError):
    """Output directory is locked by another run."""
