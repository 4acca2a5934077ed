"""Exception and warning types shared across the package."""


class HypersolveError(Exception):
    """Base class for all solver errors."""


class HypersolveWarning(UserWarning):
    """Base class for non-fatal diagnostics."""


class DegenerateObjective(HypersolveWarning):
    """Objective is orthogonal to the constraint null space: every feasible point optimal."""


class DependentRowsDropped(HypersolveWarning):
    """Linearly dependent constraint rows were removed during geometry construction."""


class InfeasibleInteriorPoint(HypersolveError):
    """The supplied interior point does not satisfy the affine constraints."""


class UnsupportedConeForExactRe(HypersolveError):
    """Interior-radius formula only applies to cones built from linear factors."""


class ComplexRoots(HypersolveError):
    """Quadratic factor produced complex roots: not hyperbolic along the given direction."""


class JacobiNoConvergence(HypersolveError):
    """Cyclic Jacobi failed to reach the off-diagonal threshold within the sweep limit."""


class NearSingularDenominator(HypersolveError):
    """Eigen-gradient denominator vanished without the roots being merged."""


class NotHyperbolicWrtE(HypersolveError):
    """The cone description is not hyperbolic with respect to the supplied direction."""


class ProjectionUndefined(HypersolveError):
    """Radial projection requested at a point with minimum eigenvalue >= 1."""


class BadWarmStart(HypersolveError):
    """Warm-start point does not improve on the interior point's objective value."""


class BadStart(HypersolveError):
    """Accelerated-method start point violates its input conditions."""


class LipschitzOverflow(HypersolveError):
    """Backtracking doubled the Lipschitz trial past the overflow ceiling."""


class PrematureRestart(HypersolveError):
    """Restart requested from an iterate that has not crossed the trigger level."""


class DegenerateDegree(HypersolveError):
    """Cone degree below 2: the smoothing parameters are undefined."""


class SchemaError(HypersolveError):
    """Problem file violates the schema."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class TooLarge(HypersolveError):
    """Enumeration oracle would exceed its combination budget."""


class Unbounded(HypersolveError):
    """Oracle found no finite minimum."""


class Infeasible(HypersolveError):
    """Oracle found no feasible point."""


class DimensionMismatch(HypersolveError):
    """Operation requires a different subspace dimension than the instance provides."""
