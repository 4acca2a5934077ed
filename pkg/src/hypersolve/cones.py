"""Hyperbolicity-cone algebra.

A cone description is a tree of factor leaves (orthant, halfspace, quadratic
form, symmetric-matrix block) combined by intersection (same space, factor
polynomials multiply) and Cartesian product (disjoint coordinate blocks).
Eigenvalues of a point x relative to the distinguished interior direction e
are the roots of t -> p(x - t e) where p is the cone's factored polynomial;
they are computed leaf by leaf and pooled.

Symmetric-matrix blocks are stored in scaled vector form ("svec"): row-major
lower triangle, off-diagonal entries multiplied by sqrt(2), which makes the
coordinate dot product equal the trace inner product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    ComplexRoots,
    JacobiNoConvergence,
    NearSingularDenominator,
    NotHyperbolicWrtE,
    UnsupportedConeForExactRe,
)

MULT_TOL_FACTOR = 1e-7
_DISC_TOL = 1e-10
_DENOM_TOL = 1e-14

SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# cone descriptions


def _freeze(arr):
    a = np.array(arr, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Orthant:
    """Nonnegative orthant on a block of `dim` coordinates (p = prod x_j)."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("orthant block must have at least one coordinate")


@dataclass(frozen=True, eq=False)
class Halfspace:
    """Single linear factor p(x) = a . x."""

    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _freeze(self.a))
        if self.a.ndim != 1 or self.a.size < 1:
            raise ValueError("halfspace normal must be a nonempty vector")
        if not np.all(np.isfinite(self.a)):
            raise ValueError("halfspace normal has non-finite entries")


@dataclass(frozen=True, eq=False)
class Quadratic:
    """Degree-2 factor p(y) = (1/2) y^T B y with B symmetric."""

    B: np.ndarray

    def __post_init__(self):
        B = np.array(self.B, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("quadratic matrix must be square")
        if not np.all(np.isfinite(B)):
            raise ValueError("quadratic matrix has non-finite entries")
        scale = np.linalg.norm(B)
        if np.abs(B - B.T).max() > 1e-12 * max(scale, 1.0):
            raise ValueError("quadratic matrix must be symmetric to 1e-12 relative")
        B = 0.5 * (B + B.T)
        B.setflags(write=False)
        object.__setattr__(self, "B", B)


@dataclass(frozen=True, eq=False)
class Psd:
    """Order-m symmetric positive semidefinite block, p = det, svec packed."""

    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("psd block order must be at least 1")


@dataclass(frozen=True, eq=False)
class Intersection:
    """Intersection of cones on the same space; p is the product of parts."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("intersection needs at least one part")
        d = space_dim(parts[0])
        for p in parts[1:]:
            if space_dim(p) != d:
                raise ValueError("intersection parts must share one space")
        object.__setattr__(self, "parts", parts)


@dataclass(frozen=True, eq=False)
class Product:
    """Cartesian product; blocks are (start, stop, cone) coordinate ranges."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple((int(s), int(t), c) for (s, t, c) in self.blocks)
        if not blocks:
            raise ValueError("product needs at least one block")
        expect = 0
        for start, stop, cone in sorted(blocks, key=lambda b: b[0]):
            if start != expect:
                raise ValueError("product blocks must partition the coordinates")
            if stop - start != space_dim(cone):
                raise ValueError("product block range does not match its cone's dimension")
            expect = stop
        object.__setattr__(self, "blocks", blocks)


def space_dim(cone) -> int:
    """Number of coordinates of the space the cone lives on."""
    if isinstance(cone, Orthant):
        return cone.dim
    if isinstance(cone, Halfspace):
        return cone.a.size
    if isinstance(cone, Quadratic):
        return cone.B.shape[0]
    if isinstance(cone, Psd):
        return cone.order * (cone.order + 1) // 2
    if isinstance(cone, Intersection):
        return space_dim(cone.parts[0])
    if isinstance(cone, Product):
        return max(stop for _, stop, _ in cone.blocks)
    raise TypeError(f"not a cone description: {cone!r}")


def degree(cone) -> int:
    """Total degree of the cone's polynomial (number of eigenvalues)."""
    if isinstance(cone, Orthant):
        return cone.dim
    if isinstance(cone, Halfspace):
        return 1
    if isinstance(cone, Quadratic):
        return 2
    if isinstance(cone, Psd):
        return cone.order
    if isinstance(cone, Intersection):
        return sum(degree(p) for p in cone.parts)
    if isinstance(cone, Product):
        return sum(degree(c) for _, _, c in cone.blocks)
    raise TypeError(f"not a cone description: {cone!r}")


# ---------------------------------------------------------------------------
# symmetric-matrix packing


def svec(mat: np.ndarray) -> np.ndarray:
    """Pack a symmetric matrix into scaled lower-triangle vector form."""
    m = mat.shape[0]
    out = np.empty(m * (m + 1) // 2)
    k = 0
    for i in range(m):
        for j in range(i + 1):
            out[k] = mat[i, j] if i == j else SQRT2 * mat[i, j]
            k += 1
    return out


def unsvec(vec: np.ndarray, order: int) -> np.ndarray:
    """Inverse of :func:`svec`."""
    mat = np.empty((order, order))
    k = 0
    for i in range(order):
        for j in range(i + 1):
            v = vec[k] if i == j else vec[k] / SQRT2
            mat[i, j] = v
            mat[j, i] = v
            k += 1
    return mat


def jacobi_eigh(mat: np.ndarray):
    """Symmetric eigendecomposition via cyclic Jacobi (ascending eigenvalues)."""
    m = np.asarray(mat, dtype=float)
    fro = np.linalg.norm(m)
    if fro == 0.0:
        return np.zeros(m.shape[0]), np.eye(m.shape[0])
    a, v, sweeps = _kernels.jacobi_cyclic(m, 1e-12 * fro, 30)
    if sweeps < 0:
        raise JacobiNoConvergence(f"no convergence after 30 sweeps on order {m.shape[0]}")
    vals = np.diag(a).copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], v[:, order]


# ---------------------------------------------------------------------------
# interior-direction validation


def validate_interior(cone, e: np.ndarray) -> list[str]:
    """Check that e is strictly interior and the description is hyperbolic along e.

    Returns human-readable per-leaf diagnostics; raises NotHyperbolicWrtE on
    the first failing leaf.
    """
    e = np.asarray(e, dtype=float)
    if e.shape != (space_dim(cone),):
        raise ValueError("direction length does not match the cone's space")
    notes: list[str] = []
    _validate(cone, e, "cone", notes)
    return notes


def _validate(cone, e, path, notes):
    if isinstance(cone, Orthant):
        emin = e.min()
        if emin <= 0.0:
            raise NotHyperbolicWrtE(f"{path}: orthant direction has a nonpositive coordinate ({emin})")
        notes.append(f"{path}: orthant(dim={cone.dim}) ok, min coordinate {emin:.6g}")
    elif isinstance(cone, Halfspace):
        ae = float(cone.a @ e)
        if ae <= 0.0:
            raise NotHyperbolicWrtE(f"{path}: halfspace has a.e = {ae} <= 0")
        notes.append(f"{path}: halfspace ok, a.e = {ae:.6g}")
    elif isinstance(cone, Quadratic):
        B = cone.B
        Be = B @ e
        alpha = float(e @ Be)
        if alpha <= 0.0:
            raise NotHyperbolicWrtE(f"{path}: quadratic has e.Be = {alpha} <= 0")
        reduced = B - np.outer(Be, Be) / alpha
        vals, _ = jacobi_eigh(reduced)
        top = vals[-1]
        tol = 1e-10 * max(np.linalg.norm(B), 1.0)
        if top > tol:
            raise NotHyperbolicWrtE(
                f"{path}: quadratic factor is not real-rooted along e (residual eigenvalue {top:.3g})"
            )
        notes.append(f"{path}: quadratic ok, e.Be = {alpha:.6g}")
    elif isinstance(cone, Psd):
        E = unsvec(e, cone.order)
        vals, _ = jacobi_eigh(E)
        tol = 1e-10 * max(np.linalg.norm(E), 1.0)
        if vals[0] <= tol:
            raise NotHyperbolicWrtE(
                f"{path}: psd direction matrix is not positive definite (min eigenvalue {vals[0]:.3g})"
            )
        notes.append(f"{path}: psd(order={cone.order}) ok, min eigenvalue {vals[0]:.6g}")
    elif isinstance(cone, Intersection):
        for i, part in enumerate(cone.parts):
            _validate(part, e, f"{path}.part[{i}]", notes)
    elif isinstance(cone, Product):
        for i, (start, stop, sub) in enumerate(cone.blocks):
            _validate(sub, e[start:stop], f"{path}.block[{i}]", notes)
    else:
        raise TypeError(f"not a cone description: {cone!r}")


# ---------------------------------------------------------------------------
# eigenvalues and eigen-gradients

# One record per leaf: (offset, block_dim, values, mults, dirs) where values
# are the leaf's distinct roots (quadratic / psd leaves merged internally,
# linear factors never merged), mults their multiplicities, and dirs (when
# requested) the per-root gradient directions on the leaf's block, one row
# per root.


def _cluster(vals_sorted, factor):
    """Chain-cluster ascending values; gap > tol starts a new cluster."""
    tol = factor * (1.0 + abs(vals_sorted[0]) + abs(vals_sorted[-1]))
    bounds = [0]
    for i in range(1, vals_sorted.size):
        if vals_sorted[i] - vals_sorted[i - 1] > tol:
            bounds.append(i)
    bounds.append(vals_sorted.size)
    return bounds


def _quad_roots(B, e, x):
    Be = B @ e
    Bx = B @ x
    alpha = float(e @ Be)
    beta = float(e @ Bx)
    gamma = float(x @ Bx)
    disc = beta * beta - alpha * gamma
    scale = beta * beta + abs(alpha * gamma)
    if disc < -_DISC_TOL * scale:
        raise ComplexRoots(
            f"quadratic factor has complex eigenvalues (disc = {disc:.3g}, scale = {scale:.3g})"
        )
    rt = math.sqrt(max(disc, 0.0))
    s = 1.0 if beta >= 0.0 else -1.0
    r1 = (beta + s * rt) / alpha
    r2 = 0.0 if r1 == 0.0 else gamma / (alpha * r1)
    lo, hi = (r1, r2) if r1 <= r2 else (r2, r1)
    return lo, hi, alpha, beta, Be, Bx


def _leaf_eigs(cone, e, x, offset, want_dirs, factor, out):
    if isinstance(cone, Orthant):
        vals = x / e
        mults = np.ones(vals.size, dtype=np.int64)
        dirs = np.diag(1.0 / e) if want_dirs else None
        out.append((offset, cone.dim, vals, mults, dirs))
    elif isinstance(cone, Halfspace):
        ae = float(cone.a @ e)
        vals = np.array([float(cone.a @ x) / ae])
        dirs = (cone.a / ae).reshape(1, -1) if want_dirs else None
        out.append((offset, cone.a.size, vals, np.array([1], dtype=np.int64), dirs))
    elif isinstance(cone, Quadratic):
        lo, hi, alpha, beta, Be, Bx = _quad_roots(cone.B, e, x)
        tol = factor * (1.0 + abs(lo) + abs(hi))
        if hi - lo <= tol:
            lam = 0.5 * (lo + hi)
            dirs = (Be / alpha).reshape(1, -1) if want_dirs else None
            out.append((offset, e.size, np.array([lam]), np.array([2], dtype=np.int64), dirs))
        else:
            vals = np.array([lo, hi])
            dirs = None
            if want_dirs:
                dirs = np.empty((2, e.size))
                for row, lam in enumerate((lo, hi)):
                    denom = beta - lam * alpha
                    dscale = abs(beta) + abs(alpha * lam) + 1e-300
                    if abs(denom) < _DENOM_TOL * dscale:
                        raise NearSingularDenominator(
                            f"quadratic eigen-gradient denominator {denom:.3g} with unmerged roots"
                        )
                    dirs[row] = (Bx - lam * Be) / denom
            out.append((offset, e.size, vals, np.ones(2, dtype=np.int64), dirs))
    elif isinstance(cone, Psd):
        m = cone.order
        X = unsvec(x, m)
        E = unsvec(e, m)
        R = np.linalg.cholesky(E)
        T = np.linalg.solve(R, X)
        M = np.linalg.solve(R, T.T).T
        M = 0.5 * (M + M.T)
        eigvals, V = jacobi_eigh(M)
        bounds = _cluster(eigvals, factor)
        nclust = len(bounds) - 1
        vals = np.empty(nclust)
        mults = np.empty(nclust, dtype=np.int64)
        dirs = np.empty((nclust, x.size)) if want_dirs else None
        U = np.linalg.solve(R.T, V) if want_dirs else None
        for ci in range(nclust):
            i0, i1 = bounds[ci], bounds[ci + 1]
            vals[ci] = eigvals[i0:i1].mean()
            mults[ci] = i1 - i0
            if want_dirs:
                Uc = U[:, i0:i1]
                dirs[ci] = svec(Uc @ Uc.T) / (i1 - i0)
        out.append((offset, x.size, vals, mults, dirs))
    elif isinstance(cone, Intersection):
        for part in cone.parts:
            _leaf_eigs(part, e, x, offset, want_dirs, factor, out)
    elif isinstance(cone, Product):
        for start, stop, sub in cone.blocks:
            _leaf_eigs(sub, e[start:stop], x[start:stop], offset + start, want_dirs, factor, out)
    else:
        raise TypeError(f"not a cone description: {cone!r}")
    return out


def leaf_eigendata(cone, e, x, want_dirs=True, mult_tol=MULT_TOL_FACTOR):
    """Per-leaf eigenvalues (and gradient directions) of x relative to e."""
    e = np.asarray(e, dtype=float)
    x = np.asarray(x, dtype=float)
    return _leaf_eigs(cone, e, x, 0, want_dirs, mult_tol, [])


def all_eigenvalues(cone, e, x, mult_tol=MULT_TOL_FACTOR):
    """Concatenated raw (values, mults) over leaves, no cross-leaf merging."""
    leaves = leaf_eigendata(cone, e, x, want_dirs=False, mult_tol=mult_tol)
    vals = np.concatenate([lv for (_, _, lv, _, _) in leaves])
    mults = np.concatenate([lm for (_, _, _, lm, _) in leaves])
    return vals, mults


# ---------------------------------------------------------------------------
# public spectrum operations


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Distinct eigenvalues (ascending) with multiplicities summing to the degree."""

    values: np.ndarray
    multiplicities: np.ndarray


def spectrum(cone, e, x, mult_tol=MULT_TOL_FACTOR) -> Spectrum:
    """Eigenvalues of x relative to e, near-equal roots merged with multiplicity."""
    vals, mults = all_eigenvalues(cone, e, x, mult_tol)
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    mults = mults[order]
    bounds = _cluster(vals, mult_tol)
    n = len(bounds) - 1
    mvals = np.empty(n)
    mmults = np.empty(n, dtype=np.int64)
    for ci in range(n):
        i0, i1 = bounds[ci], bounds[ci + 1]
        w = mults[i0:i1]
        mvals[ci] = float(vals[i0:i1] @ w) / w.sum()
        mmults[ci] = w.sum()
    return Spectrum(_freeze(mvals), mmults)


def lambda_min(cone, e, x, mult_tol=MULT_TOL_FACTOR) -> float:
    """Smallest eigenvalue (smallest raw root, no cluster averaging)."""
    vals, _ = all_eigenvalues(cone, e, x, mult_tol)
    return float(vals.min())


def lambda_max(cone, e, x, mult_tol=MULT_TOL_FACTOR) -> float:
    """Largest eigenvalue; equals -lambda_min(-x)."""
    vals, _ = all_eigenvalues(cone, e, x, mult_tol)
    return float(vals.max())


def seminorm_inf(cone, e, u, mult_tol=MULT_TOL_FACTOR) -> float:
    """max_j |eigenvalue_j(u)| — the seminorm whose unit ball is the largest
    e-symmetric set inside the cone."""
    vals, _ = all_eigenvalues(cone, e, u, mult_tol)
    return float(np.abs(vals).max())


def membership(cone, e, x, tol=1e-9) -> bool:
    """True iff lambda_min(x) >= -tol."""
    return lambda_min(cone, e, x) >= -tol


@dataclass(frozen=True, eq=False)
class EigenGradient:
    """One distinct eigenvalue with its multiplicity and gradient direction.

    The direction is the gradient of the isolated (multiplicity-aware) root
    function; it always satisfies direction . e = 1.
    """

    value: float
    multiplicity: int
    direction: np.ndarray


def eigen_gradients(cone, e, x, mult_tol=MULT_TOL_FACTOR) -> list[EigenGradient]:
    """Per-root gradient directions of x relative to e, leaf by leaf."""
    e = np.asarray(e, dtype=float)
    x = np.asarray(x, dtype=float)
    d = space_dim(cone)
    leaves = leaf_eigendata(cone, e, x, want_dirs=True, mult_tol=mult_tol)
    out = []
    for offset, bdim, vals, mults, dirs in leaves:
        for i in range(vals.size):
            g = np.zeros(d)
            g[offset : offset + bdim] = dirs[i]
            g.setflags(write=False)
            out.append(EigenGradient(float(vals[i]), int(mults[i]), g))
    return out


def linear_factors(cone, dim=None) -> list[np.ndarray]:
    """Full-space normals of all degree-1 factors; errors on other leaves."""
    if dim is None:
        dim = space_dim(cone)
    return _linear_factors(cone, 0, dim, [])


def _linear_factors(cone, offset, dim, out):
    if isinstance(cone, Orthant):
        for j in range(cone.dim):
            a = np.zeros(dim)
            a[offset + j] = 1.0
            out.append(a)
    elif isinstance(cone, Halfspace):
        a = np.zeros(dim)
        a[offset : offset + cone.a.size] = cone.a
        out.append(a)
    elif isinstance(cone, Intersection):
        for part in cone.parts:
            _linear_factors(part, offset, dim, out)
    elif isinstance(cone, Product):
        for start, stop, sub in cone.blocks:
            _linear_factors(sub, offset + start, dim, out)
    else:
        raise UnsupportedConeForExactRe(
            f"interior radius needs linear factors only, found {type(cone).__name__}"
        )
    return out
