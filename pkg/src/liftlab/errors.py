"""Exception hierarchy shared by every liftlab module."""


class LiftlabError(Exception):
    """Base class for all liftlab errors."""


class InvalidSize(LiftlabError, ValueError):
    """A graph family was requested at a size where it is not defined."""


class InvalidParameter(LiftlabError, ValueError):
    """A numeric parameter lies outside its admissible domain."""


class InvalidInput(LiftlabError, ValueError):
    """Structurally malformed input (shapes, graph labeling, state invariants)."""


class InfeasibleCoupling(LiftlabError):
    """The diagonal coupling between ADMM and GD normalizations has no valid solution."""


class SingularNormalization(LiftlabError, ZeroDivisionError):
    """A normalizing diagonal has an entry equal to one."""


class InconsistentAlpha(LiftlabError):
    """Per-edge step sizes implied by (gamma, rho, q) disagree."""

    def __init__(self, message, spread, offending):
        super().__init__(message)
        self.spread = spread
        self.offending = offending


class DegenerateCollapse(LiftlabError):
    """Collapsing a lifted chain produced a zero-probability base state."""


class NotMixed(LiftlabError):
    """A chain failed to mix within the step budget."""

    def __init__(self, message, t_max):
        super().__init__(message)
        self.t_max = t_max


class DegenerateSpectrum(LiftlabError):
    """Every eigenvalue is on the unit circle; no convergence rate exists."""


class NotConvergent(LiftlabError):
    """A rate at or above one was passed where a convergent rate is required."""


class NumericalFailure(LiftlabError, ArithmeticError):
    """The eigensolver (or another LAPACK routine) failed to converge."""
