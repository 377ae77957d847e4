"""Exception and warning types shared across the package."""


class SemicohError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SemicohError):
    """Invalid scenario configuration or parameter set."""


class ComputeError(SemicohError):
    """A numerical procedure failed."""


class GridTooCoarse(ComputeError):
    pass


class UnsupportedSymbol(ComputeError):
    pass


class DegreeTooHigh(ComputeError):
    pass


class StepFailure(ComputeError):
    pass


class NonFiniteState(ComputeError):
    pass


class Degenerate(ComputeError):
    pass


class Unbound(ComputeError):
    pass


class BelowMinimum(ComputeError):
    pass


class NoConvergence(ComputeError):
    pass


class ReturnsBranchAmbiguity(ComputeError):
    """Several distinct roots of the boundary problem were found.

    The converged trajectories are kept in ``roots``.
    """

    def __init__(self, message, roots=()):
        super().__init__(message)
        self.roots = list(roots)


class ZeroCrossing(ComputeError):
    pass


class NoRootTrajectory(ComputeError):
    pass


class NotConfining(ComputeError):
    pass


class QuadratureFailure(ComputeError):
    pass


class NoBracket(ComputeError):
    pass


class DegenerateStationaryPoint(ComputeError):
    pass


class LeakageWarning(UserWarning):
    """Projection onto the finite basis lost part of the norm."""


class PoleProximityWarning(UserWarning):
    """Evaluation point sits on top of a pole of the Green's function."""


class StationaryPointWarning(UserWarning):
    """Phase-space velocity vanishes at some grid points."""


class CausticWarning(UserWarning):
    """Prefactor diverges at a focal point."""
