"""Exception types shared across the package."""


class CentroflowError(Exception):
    """Base class for all package-specific errors."""


class NonPositive(CentroflowError):
    """Support samples must be strictly positive (origin interior)."""


class NonConvex(CentroflowError):
    """Curvature h'' + h fails strict positivity somewhere on the grid."""


class AsymmetricData(CentroflowError):
    """Samples flagged origin-symmetric but antipodal values disagree."""


class GridMismatch(CentroflowError):
    """Binary operation applied to bodies with different grid sizes."""


class ClosureViolated(CentroflowError):
    """Candidate curvature density carries first-harmonic mass; no closed
    convex curve has that surface area measure."""


class NonConvexSolution(CentroflowError):
    """Curvature-prescription solve produced a non-convex support function."""


class OptimizationFailed(CentroflowError):
    """A deterministic search failed to improve on its coarse-grid start."""


class ConvexityLost(CentroflowError):
    """Time stepping lost strict convexity.  Signals a step-size failure,
    not a property of the evolution itself."""

    def __init__(self, t, message=""):
        self.t = t
        super().__init__(message or f"convexity lost at t={t:.9g}")


class StepUnderflow(CentroflowError):
    """Adaptive step size collapsed below floating-point resolution."""
