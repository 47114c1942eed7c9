"""Exception types raised across the package.

Every failure mode that callers are expected to handle gets its own class so
the CLI can map them to distinct exit codes.
"""


class LakeVortexError(Exception):
    """Base class for all package errors."""


class ExponentOutOfRange(LakeVortexError):
    """Nonlinearity exponent outside the supported range p > 1."""


class NoConvergence(LakeVortexError):
    """An iterative procedure failed to converge."""


class NoRoot(LakeVortexError):
    """A bracketed root find could not establish a sign change."""


class OutOfBall(LakeVortexError):
    """Radial profile evaluated outside its ball of definition."""


class TooCoarse(LakeVortexError):
    """Grid spacing too coarse for the requested shape."""


class SourceNearBoundary(LakeVortexError):
    """Green-function source closer to the boundary than the grid can resolve."""


class NearSingularSystem(LakeVortexError):
    """Vortex strength system lost diagonal dominance (eps too large)."""


class NonpositiveStrength(LakeVortexError):
    """Strength system returned a nonpositive threshold."""


class InadmissibleCenters(LakeVortexError):
    """Vortex centers violate the configured admissibility constraints."""


class ExtremumOnRegionBoundary(LakeVortexError):
    """Center optimization terminated on the search-region boundary."""


class EmptyCore(LakeVortexError):
    """Positivity set of a state is empty (trivial branch)."""


class SolverFailure(LakeVortexError):
    """Base class for nonlinear solver failures; carries the partial state."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class SolverDiverged(SolverFailure):
    """Newton iteration hit the iteration cap without converging."""


class FellToTrivial(SolverFailure):
    """Iterate collapsed onto the trivial branch w = 0."""


class ScenarioParseError(LakeVortexError):
    """Scenario file could not be parsed."""


class ScenarioValidationError(LakeVortexError):
    """Scenario parsed but failed validation."""


class InvariantViolation(LakeVortexError):
    """A hard run invariant failed after the solve."""
