"""Exception types raised by glphase."""


class GlphaseError(Exception):
    """Base class for all package-specific errors."""


class BadShape(GlphaseError, ValueError):
    """An array argument has the wrong shape or length."""


class RankDeficient(GlphaseError, ValueError):
    """A dense transform matrix does not have full column rank."""


class BadLattice(GlphaseError, ValueError):
    """Time-frequency lattice parameters are inconsistent or undersampled."""


class NotAFrame(GlphaseError, ValueError):
    """The Gabor system on the requested lattice has no positive lower frame bound."""


class Cond1Violated(GlphaseError, ValueError):
    """The (beta, gamma) admissibility condition of the guarantee gate fails."""


class GateFailed(GlphaseError, ValueError):
    """A parameter triple does not satisfy the convergence guarantee."""


class NonFiniteIterate(GlphaseError, RuntimeError):
    """A solver iterate became NaN or infinite.

    The offending iteration index is stored in ``iteration``.
    """

    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or f"non-finite iterate at iteration {iteration}")


class UnsupportedFormat(GlphaseError, ValueError):
    """An input file is not in a format the loader understands."""


class EmptyFile(GlphaseError, ValueError):
    """An input file contains no usable samples."""
