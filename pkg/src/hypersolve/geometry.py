"""Affine feasible-set geometry: the constraint subspace and its projector.

The solvers move inside level sets of the objective, i.e. inside translates
of L = null(A) intersected with the orthogonal complement of the objective
vector.  A single orthonormal basis of L is built once per instance and all
gradient projections reuse it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import cones
from .errors import DegenerateObjective, DependentRowsDropped, InfeasibleInteriorPoint

_RANK_TOL = 1e-10


def _asvec(v, name):
    a = np.asarray(v, dtype=float)
    if a.ndim != 1:
        raise ValueError(f"{name} must be a vector")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class AffineGeometry:
    """Immutable affine-set data: cleaned constraints and an orthonormal basis of L."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    e: np.ndarray
    basis_L: np.ndarray  # (d, dim_L), orthonormal columns
    projector: np.ndarray  # basis_L @ basis_L.T, cached dense
    degenerate_objective: bool
    degenerate_dimension: bool
    dropped_rows: tuple
    feas_tol: float

    @property
    def dim(self) -> int:
        return self.c.size

    @property
    def dim_L(self) -> int:
        return self.basis_L.shape[1]


def _orthogonalize(v, rows):
    # two passes of classical Gram-Schmidt against each accepted direction
    for _ in range(2):
        for q in rows:
            v = v - (q @ v) * q
    return v


def build_geometry(A, b, c, e, feas_tol=None) -> AffineGeometry:
    """Construct the affine geometry for constraints Ax = b with objective c.

    Dependent rows of A are dropped with a warning.  The interior point e
    must satisfy the constraints to within feas_tol (default
    1e-9 * (1 + ||b||)).  A degenerate objective (c orthogonal to null(A))
    and a zero-dimensional L are flagged, not fatal.
    """
    c = _asvec(c, "objective")
    e = _asvec(e, "interior point")
    d = c.size
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        A = A.reshape(0, d)
    if A.ndim != 2 or A.shape[1] != d:
        raise ValueError("constraint matrix shape does not match the dimension")
    if not np.all(np.isfinite(A)):
        raise ValueError("constraint matrix has non-finite entries")
    b = np.asarray(b, dtype=float).reshape(-1)
    if b.size != A.shape[0]:
        raise ValueError("right-hand side length does not match the constraint rows")
    if e.size != d:
        raise ValueError("interior point length does not match the dimension")

    if feas_tol is None:
        feas_tol = 1e-9 * (1.0 + np.linalg.norm(b))
    resid = np.linalg.norm(A @ e - b) if A.shape[0] else 0.0
    if resid > feas_tol:
        raise InfeasibleInteriorPoint(
            f"||A e - b|| = {resid:.3g} exceeds feasibility tolerance {feas_tol:.3g}"
        )

    max_row = max((np.linalg.norm(r) for r in A), default=1.0)
    rank_tol = _RANK_TOL * max(max_row, 1.0)

    rows = []  # orthonormal basis of the row space of A
    kept, dropped = [], []
    for i, r in enumerate(A):
        v = _orthogonalize(r.copy(), rows)
        nv = np.linalg.norm(v)
        if nv <= rank_tol:
            dropped.append(i)
        else:
            rows.append(v / nv)
            kept.append(i)
    if dropped:
        warnings.warn(
            f"dropping {len(dropped)} dependent constraint row(s): {dropped}",
            DependentRowsDropped,
            stacklevel=2,
        )

    c_perp = _orthogonalize(c.copy(), rows)
    degenerate_objective = np.linalg.norm(c_perp) <= _RANK_TOL * (1.0 + np.linalg.norm(c))
    if degenerate_objective:
        warnings.warn(
            "objective is orthogonal to the constraint null space; every feasible point is optimal",
            DegenerateObjective,
            stacklevel=2,
        )
        span = rows
    else:
        span = rows + [c_perp / np.linalg.norm(c_perp)]

    basis = []
    for i in range(d):
        v = np.zeros(d)
        v[i] = 1.0
        v = _orthogonalize(v, span + basis)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
    basis_L = np.column_stack(basis) if basis else np.zeros((d, 0))

    A_kept = A[kept] if kept else np.zeros((0, d))
    b_kept = b[kept] if kept else np.zeros(0)
    for arr in (A_kept, b_kept, c, e, basis_L):
        arr.setflags(write=False)
    projector = basis_L @ basis_L.T
    projector.setflags(write=False)

    return AffineGeometry(
        A=A_kept,
        b=b_kept,
        c=c,
        e=e,
        basis_L=basis_L,
        projector=projector,
        degenerate_objective=bool(degenerate_objective),
        degenerate_dimension=basis_L.shape[1] == 0,
        dropped_rows=tuple(dropped),
        feas_tol=float(feas_tol),
    )


def project_L(geom: AffineGeometry, g) -> np.ndarray:
    """Orthogonal projection of g onto L = null(A) ∩ c-perp."""
    g = np.asarray(g, dtype=float)
    if g.size != geom.dim:
        raise ValueError("vector length does not match the geometry dimension")
    if geom.dim_L == 0:
        return np.zeros(geom.dim)
    return geom.basis_L @ (geom.basis_L.T @ g)


def affine_residual(geom: AffineGeometry, x) -> float:
    """Entrywise infinity-norm of Ax - b (iterate-feasibility diagnostic)."""
    x = np.asarray(x, dtype=float)
    if geom.A.shape[0] == 0:
        return 0.0
    return float(np.abs(geom.A @ x - geom.b).max())


def compute_r_e(inst) -> float:
    """Radius of the largest ball around e, within e + L, inside the cone.

    Exact for cones built from linear factors: the distance from e to each
    factor's boundary hyperplane inside e + L is (a.e) / ||P_L a||; the
    radius is their minimum.  Factors invisible from L (||P_L a|| = 0) never
    cut the slice; if none cuts it the radius is infinite.
    """
    geom = inst.geometry
    factors = cones.linear_factors(inst.cone, geom.dim)
    r = np.inf
    for a in factors:
        ae = float(a @ inst.e)
        pa = np.linalg.norm(project_L(geom, a))
        if pa <= 1e-14 * max(np.linalg.norm(a), 1.0):
            continue
        r = min(r, ae / pa)
    return float(r)
