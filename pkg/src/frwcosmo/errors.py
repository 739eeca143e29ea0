"""Typed errors raised across the package.

Every failure mode that callers are expected to branch on gets its own class;
anything else surfaces as a plain ValueError from the offending layer.
"""


class FrwError(Exception):
    """Base class for all cosmology-model errors."""


# -- parameter validation ----------------------------------------------------

class GammaBarZero(FrwError):
    """The reduced barotropic index is zero, which the model family excludes."""


class NonPositiveConstant(FrwError):
    """An integration constant or reference scale that must be positive is not."""


class BadCurvature(FrwError):
    """Spatial curvature index outside {-1, 0, +1}."""


class NegativeDensity(FrwError):
    """Recovered energy density is negative beyond tolerance."""


# -- special functions -------------------------------------------------------

class CNonPositiveInteger(FrwError):
    """Lower hypergeometric parameter c is a nonpositive integer."""


class ArgumentOutOfDomain(FrwError):
    """Hypergeometric argument outside the supported real domain."""


class NoConvergence(FrwError):
    """Series or quadrature failed to reach tolerance within its budget."""


class FlatUniverse(FrwError):
    """Operation requires nonzero spatial curvature."""


class DegenerateGamma(FrwError):
    """gamma_bar falls in the degenerate set where the closed solution family breaks down."""


class UOutOfRange(FrwError):
    """Compactified scale-factor variable u outside the supported range."""


# -- closed forms ------------------------------------------------------------

class OutsideWindow(FrwError):
    """Requested time lies outside the formula's validity window."""


class WrongRegime(FrwError):
    """Parameters do not classify to the family this evaluator implements."""


class NoValidBranch(FrwError):
    """No sign selection satisfies the constraint on the declared window."""


class AmbiguousBranch(FrwError):
    """More than one sign selection satisfies the constraint on the declared window."""


# -- numerics ----------------------------------------------------------------

class NoBracket(FrwError):
    """Root or inverse not bracketed by the supplied interval."""


class NonPositiveIntegrand(FrwError):
    """Squared expansion rate is nonpositive inside the integration range."""


class EndpointNotSimpleRoot(FrwError):
    """An endpoint declared singular is not a simple root of z(a)."""


class StepSizeUnderflow(FrwError):
    """Adaptive integrator could not proceed at the requested tolerance."""


class ScaleFactorCollapse(FrwError):
    """Scale factor hit the collapse floor during integration.

    Attributes
    ----------
    crossing_time : float
        Estimated time at which a reached the floor.
    trajectory : Trajectory or None
        Samples accumulated before the collapse, when available.
    """

    def __init__(self, message, crossing_time=None, trajectory=None):
        super().__init__(message)
        self.crossing_time = crossing_time
        self.trajectory = trajectory


class Divergence(FrwError):
    """Requested target is beyond the reachable range of the solution."""
