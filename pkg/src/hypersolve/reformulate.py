"""Problem container and the radial-projection equivalence machinery.

A conic instance (objective, affine constraints, strictly interior point,
cone) is equivalent to maximizing the minimum eigenvalue over a level set of
the objective; the radial projection maps points of a level set to boundary
points of the cone and back.  The error-translation formulas here are pure
arithmetic bridges used by tests and reporting only — solvers never assume
the optimal value is known.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cones, geometry
from .errors import BadWarmStart, InfeasibleInteriorPoint, ProjectionUndefined

_PROJ_GUARD = 1e-12


@dataclass(eq=False)
class HPInstance:
    """A hyperbolic program: min c.x s.t. Ax = b, x in cone, with interior e."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    e: np.ndarray
    cone: object
    metadata: dict | None = None
    feas_tol: float | None = None
    mult_tol: float = cones.MULT_TOL_FACTOR
    _geometry: geometry.AffineGeometry | None = field(default=None, repr=False)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.e = np.asarray(self.e, dtype=float)
        self.A = np.asarray(self.A, dtype=float)
        if self.A.size == 0:
            self.A = self.A.reshape(0, self.c.size)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        d = cones.space_dim(self.cone)
        for name, v in (("objective", self.c), ("interior point", self.e)):
            if v.shape != (d,):
                raise ValueError(f"{name} length {v.size} does not match cone dimension {d}")
            if not np.all(np.isfinite(v)):
                raise ValueError(f"{name} has non-finite entries")
        cones.validate_interior(self.cone, self.e)
        tol = self.feas_tol if self.feas_tol is not None else 1e-9 * (1.0 + np.linalg.norm(self.b))
        resid = np.linalg.norm(self.A @ self.e - self.b) if self.A.shape[0] else 0.0
        if resid > tol:
            raise InfeasibleInteriorPoint(
                f"||A e - b|| = {resid:.3g} exceeds feasibility tolerance {tol:.3g}"
            )
        self.degree = cones.degree(self.cone)

    @property
    def dim(self) -> int:
        return self.c.size

    @property
    def ce(self) -> float:
        return float(self.c @ self.e)

    @property
    def geometry(self) -> geometry.AffineGeometry:
        if self._geometry is None:
            self._geometry = geometry.build_geometry(
                self.A, self.b, self.c, self.e, feas_tol=self.feas_tol
            )
        return self._geometry

    def lambda_min(self, x) -> float:
        return cones.lambda_min(self.cone, self.e, x, self.mult_tol)


def radial_project(inst: HPInstance, x) -> np.ndarray:
    """Project x radially from e onto the cone boundary within its ray.

    pi(x) = e + (x - e) / (1 - lambda_min(x)); the result has
    lambda_min = 0 and inherits x's affine feasibility.
    """
    x = np.asarray(x, dtype=float)
    lam = inst.lambda_min(x)
    if lam >= 1.0 - _PROJ_GUARD:
        raise ProjectionUndefined(f"lambda_min(x) = {lam} >= 1; the projection ray never exits")
    return inst.e + (x - inst.e) / (1.0 - lam)


def normalize_start(inst: HPInstance, v) -> np.ndarray:
    """Rescale a warm start v toward e so its minimum eigenvalue is exactly 1/4."""
    v = np.asarray(v, dtype=float)
    cv = float(inst.c @ v)
    if cv >= inst.ce:
        raise BadWarmStart(f"warm start objective {cv} does not improve on c.e = {inst.ce}")
    lam = inst.lambda_min(v)
    return inst.e + (0.75 / (1.0 - lam)) * (v - inst.e)


def lambda_star_of_z(z: float, z_star: float, ce: float) -> float:
    """Optimal value of the eigenvalue reformulation on the level set at z."""
    return (z - z_star) / (ce - z_star)


def gap_equivalence(eps: float, z: float, z_star: float, ce: float) -> float:
    """The eigenvalue-gap threshold equivalent to relative objective gap eps."""
    return (eps / (1.0 - eps)) * (ce - z) / (ce - z_star)


def equivalent_opt_forward(inst: HPInstance, z: float, pi_star, z_star: float) -> np.ndarray:
    """Map an optimal boundary point back to the level-set optimizer at z."""
    pi_star = np.asarray(pi_star, dtype=float)
    s = (inst.ce - z) / (inst.ce - z_star)
    return inst.e + s * (pi_star - inst.e)
