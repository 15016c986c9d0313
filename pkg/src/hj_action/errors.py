"""Exception types raised by the numerical routines."""


class HJActionError(Exception):
    """Base class for every error raised by this package."""


class StepSizeUnderflow(HJActionError, ArithmeticError):
    """The adaptive integrator could not meet the requested tolerance."""


class NonpositiveEnergy(HJActionError, ValueError):
    pass


class OutsideTrajectory(HJActionError, ValueError):
    """A time was requested outside the span covered by a trajectory."""


class PhaseSingularity(HJActionError, ArithmeticError):
    """A phase sine vanishes, so an endpoint representation degenerates."""


class ConjugatePoints(PhaseSingularity):
    """The endpoints are conjugate: the extremal through them is not isolated."""


class NoSuchBranch(HJActionError, ValueError):
    """No extremal with the requested number of interior turning points."""


class SingularQuadrature(HJActionError, ArithmeticError):
    """A quadrature integrand has a singularity that cannot be integrated."""
