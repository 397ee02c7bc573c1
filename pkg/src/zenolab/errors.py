"""Exception types raised by zenolab.

Every error derives from :class:`ZenoError` so callers (the CLI in
particular) can separate numerical failures from usage problems.
"""


class ZenoError(Exception):
    """Base class for all zenolab errors."""


class DimensionMismatch(ZenoError, ValueError):
    pass


class NonHermitianInput(ZenoError, ValueError):
    pass


class NonUnitaryInput(ZenoError, ValueError):
    pass


class ClusterAmbiguity(ZenoError):
    """Eigenphase gaps fall between ``cluster_tol`` and ``10 * cluster_tol``."""


class BadSymbol(ZenoError, ValueError):
    pass


class FirstElementNotIdentity(ZenoError, ValueError):
    pass


class NonpositiveFrequency(ZenoError, ValueError):
    pass


class OutOfTableRange(ZenoError, ValueError):
    pass


class InvalidWindow(ZenoError, ValueError):
    pass


class NumericalFailure(ZenoError):
    """Base for failures of an iterative numerical procedure."""


class QuadratureNotConverged(NumericalFailure):
    pass


class NoSignChange(NumericalFailure):
    pass


class DegenerateSpec(ZenoError, ValueError):
    pass


class PhaseCollision(ZenoError):
    """Distinct generator eigenvalues map onto the same kick eigenphase."""
