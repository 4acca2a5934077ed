"""Problem-file serialization, desk-scale generators, and independent oracles.

Problem files are strict JSON.  Vectors are flat arrays over the *external*
coordinates: a symmetric-matrix block of order m occupies m*m consecutive
entries (the full matrix, row-major); the scaled lower-triangle packing is
internal only.  Matrix blocks may appear as the whole cone or as a direct
product block, not inside an intersection node.

The oracles are deliberately independent of the solver path: vertex
enumeration for polyhedral instances, boundary bisection along the objective
direction for the symmetric quadratic-factor family emitted by
:func:`generate_socp_segment`.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import cones, geometry, smoothing
from .errors import (
    DimensionMismatch,
    Infeasible,
    SchemaError,
    TooLarge,
    Unbounded,
    UnsupportedConeForExactRe,
)
from .reformulate import HPInstance

_MAX_COMBOS = 1_000_000
_MAX_LINEAR_FACTORS = 22


# ---------------------------------------------------------------------------
# cone node parsing: file dict -> ConeSpec, with external/internal layouts

# A layout is a list of (external_size, psd_order_or_None) segments covering
# the cone's space in order.


def _require_keys(node, allowed, required, path):
    if not isinstance(node, dict):
        raise SchemaError("expected an object", path)
    for k in node:
        if k not in allowed:
            raise SchemaError(f"unknown field '{k}'", path)
    for k in required:
        if k not in node:
            raise SchemaError(f"missing field '{k}'", path)


def _num_list(value, path):
    if not isinstance(value, list) or not value:
        raise SchemaError("expected a nonempty array of numbers", path)
    out = []
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError("expected a number", f"{path}[{i}]")
        if not math.isfinite(v):
            raise SchemaError("non-finite value", f"{path}[{i}]")
        out.append(float(v))
    return np.array(out)


def _parse_cone(node, path, allow_psd=True):
    _require_keys(node, {"type", "size", "normal", "matrix", "order", "parts", "blocks"}, {"type"}, path)
    kind = node["type"]
    if kind == "orthant":
        _require_keys(node, {"type", "size"}, {"type", "size"}, path)
        size = node["size"]
        if not isinstance(size, int) or size < 1:
            raise SchemaError("orthant size must be a positive integer", f"{path}.size")
        return cones.Orthant(size), [(size, None)]
    if kind == "halfspace":
        _require_keys(node, {"type", "normal"}, {"type", "normal"}, path)
        a = _num_list(node["normal"], f"{path}.normal")
        return cones.Halfspace(a), [(a.size, None)]
    if kind == "quadratic":
        _require_keys(node, {"type", "matrix"}, {"type", "matrix"}, path)
        rows = node["matrix"]
        if not isinstance(rows, list) or not rows:
            raise SchemaError("expected a matrix (array of rows)", f"{path}.matrix")
        mat = np.array([_num_list(r, f"{path}.matrix[{i}]") for i, r in enumerate(rows)])
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise SchemaError("matrix must be square", f"{path}.matrix")
        try:
            cone = cones.Quadratic(mat)
        except ValueError as exc:
            raise SchemaError(str(exc), f"{path}.matrix") from exc
        return cone, [(mat.shape[0], None)]
    if kind == "psd":
        if not allow_psd:
            raise SchemaError("matrix blocks may not appear inside an intersection", path)
        _require_keys(node, {"type", "order"}, {"type", "order"}, path)
        order = node["order"]
        if not isinstance(order, int) or order < 1:
            raise SchemaError("psd order must be a positive integer", f"{path}.order")
        return cones.Psd(order), [(order * order, order)]
    if kind == "intersection":
        _require_keys(node, {"type", "parts"}, {"type", "parts"}, path)
        parts = node["parts"]
        if not isinstance(parts, list) or not parts:
            raise SchemaError("intersection needs a nonempty parts array", f"{path}.parts")
        parsed = [_parse_cone(p, f"{path}.parts[{i}]", allow_psd=False) for i, p in enumerate(parts)]
        sizes = {sum(s for s, _ in layout) for _, layout in parsed}
        if len(sizes) != 1:
            raise SchemaError("intersection parts disagree on the space dimension", f"{path}.parts")
        return cones.Intersection(tuple(c for c, _ in parsed)), parsed[0][1]
    if kind == "product":
        _require_keys(node, {"type", "blocks"}, {"type", "blocks"}, path)
        blocks = node["blocks"]
        if not isinstance(blocks, list) or not blocks:
            raise SchemaError("product needs a nonempty blocks array", f"{path}.blocks")
        sub, layout, ranges = [], [], []
        start = 0
        for i, bnode in enumerate(blocks):
            c, blayout = _parse_cone(bnode, f"{path}.blocks[{i}]")
            internal = cones.space_dim(c)
            ranges.append((start, start + internal, c))
            start += internal
            layout.extend(blayout)
            sub.append(c)
        return cones.Product(tuple(ranges)), layout
    raise SchemaError(f"unknown cone type '{kind}'", f"{path}.type")


def _cone_to_node(cone):
    if isinstance(cone, cones.Orthant):
        return {"type": "orthant", "size": cone.dim}, [(cone.dim, None)]
    if isinstance(cone, cones.Halfspace):
        return {"type": "halfspace", "normal": [float(v) for v in cone.a]}, [(cone.a.size, None)]
    if isinstance(cone, cones.Quadratic):
        return (
            {"type": "quadratic", "matrix": [[float(v) for v in row] for row in cone.B]},
            [(cone.B.shape[0], None)],
        )
    if isinstance(cone, cones.Psd):
        return {"type": "psd", "order": cone.order}, [(cone.order * cone.order, cone.order)]
    if isinstance(cone, cones.Intersection):
        parts, layout = [], None
        for p in cone.parts:
            node, blayout = _cone_to_node(p)
            if any(order is not None for _, order in blayout):
                raise SchemaError("matrix blocks inside an intersection cannot be serialized")
            parts.append(node)
            layout = blayout
        return {"type": "intersection", "parts": parts}, layout
    if isinstance(cone, cones.Product):
        blocks, layout = [], []
        for _, _, sub in sorted(cone.blocks, key=lambda blk: blk[0]):
            node, blayout = _cone_to_node(sub)
            blocks.append(node)
            layout.extend(blayout)
        return {"type": "product", "blocks": blocks}, layout
    raise TypeError(f"not a cone description: {cone!r}")


def _vec_to_internal(ext, layout, path, is_point):
    segs = []
    pos = 0
    for size, order in layout:
        seg = ext[pos : pos + size]
        pos += size
        if order is None:
            segs.append(seg)
            continue
        mat = seg.reshape(order, order)
        asym = np.abs(mat - mat.T).max()
        if is_point and asym > 1e-12 * max(np.abs(mat).max(), 1.0):
            raise SchemaError("matrix segment is not symmetric", path)
        segs.append(cones.svec(0.5 * (mat + mat.T)))
    return np.concatenate(segs)


def _vec_to_external(internal, layout):
    segs = []
    pos = 0
    for size, order in layout:
        if order is None:
            segs.append(internal[pos : pos + size])
            pos += size
        else:
            n_int = order * (order + 1) // 2
            segs.append(cones.unsvec(internal[pos : pos + n_int], order).reshape(-1))
            pos += n_int
    return np.concatenate(segs)


# ---------------------------------------------------------------------------
# problem files


def instance_from_dict(data) -> HPInstance:
    """Build an instance from a problem-file dictionary (strict schema)."""
    _require_keys(
        data,
        {"dimension", "objective", "affine", "interior_point", "cone", "metadata"},
        {"dimension", "objective", "affine", "interior_point", "cone"},
        "problem",
    )
    cone, layout = _parse_cone(data["cone"], "cone")
    ext_dim = sum(size for size, _ in layout)
    if data["dimension"] != ext_dim:
        raise SchemaError(f"dimension {data['dimension']} != cone's external dimension {ext_dim}", "dimension")

    obj_ext = _num_list(data["objective"], "objective")
    if obj_ext.size != ext_dim:
        raise SchemaError(f"length {obj_ext.size} != dimension {ext_dim}", "objective")
    e_ext = _num_list(data["interior_point"], "interior_point")
    if e_ext.size != ext_dim:
        raise SchemaError(f"length {e_ext.size} != dimension {ext_dim}", "interior_point")

    _require_keys(data["affine"], {"rows", "rhs"}, {"rows", "rhs"}, "affine")
    rows_node = data["affine"]["rows"]
    rhs_node = data["affine"]["rhs"]
    if not isinstance(rows_node, list):
        raise SchemaError("expected an array of rows", "affine.rows")
    if not isinstance(rhs_node, list) or len(rhs_node) != len(rows_node):
        raise SchemaError("rhs length must match the number of rows", "affine.rhs")
    rows = []
    for i, row in enumerate(rows_node):
        r = _num_list(row, f"affine.rows[{i}]")
        if r.size != ext_dim:
            raise SchemaError(f"length {r.size} != dimension {ext_dim}", f"affine.rows[{i}]")
        rows.append(_vec_to_internal(r, layout, f"affine.rows[{i}]", is_point=False))
    rhs = _num_list(rhs_node, "affine.rhs") if rhs_node else np.zeros(0)

    metadata = None
    if "metadata" in data:
        _require_keys(data["metadata"], {"known_optimum", "generator_seed"}, set(), "metadata")
        metadata = dict(data["metadata"])

    int_dim = cones.space_dim(cone)
    A = np.array(rows).reshape(len(rows), int_dim) if rows else np.zeros((0, int_dim))
    return HPInstance(
        c=_vec_to_internal(obj_ext, layout, "objective", is_point=False),
        A=A,
        b=rhs,
        e=_vec_to_internal(e_ext, layout, "interior_point", is_point=True),
        cone=cone,
        metadata=metadata,
    )


def parse_problem(text: str) -> HPInstance:
    """Parse problem-file text; schema violations raise SchemaError."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return instance_from_dict(data)


def problem_to_dict(inst: HPInstance) -> dict:
    """External problem-file dictionary for an instance."""
    node, layout = _cone_to_node(inst.cone)
    data = {
        "dimension": sum(size for size, _ in layout),
        "objective": [float(v) for v in _vec_to_external(inst.c, layout)],
        "affine": {
            "rows": [[float(v) for v in _vec_to_external(r, layout)] for r in inst.A],
            "rhs": [float(v) for v in inst.b],
        },
        "interior_point": [float(v) for v in _vec_to_external(inst.e, layout)],
        "cone": node,
    }
    if inst.metadata:
        data["metadata"] = dict(inst.metadata)
    return data


def serialize_problem(inst: HPInstance) -> str:
    return json.dumps(problem_to_dict(inst), indent=2) + "\n"


# ---------------------------------------------------------------------------
# generators


def generate_lp(n_vars: int, n_cons: int, seed: int) -> dict:
    """Random equality-constrained LP over the orthant with a built interior point.

    The constraint block is padded with the coordinate-sum row, which keeps
    every objective level set bounded.  Desk scale only.
    """
    if n_vars > 20:
        raise ValueError("generator is desk-scale: n_vars <= 20")
    if not 1 <= n_cons < n_vars:
        raise ValueError("need 1 <= n_cons < n_vars")
    rng = np.random.default_rng(seed)
    A0 = rng.normal(size=(n_cons, n_vars))
    xhat = rng.uniform(0.5, 1.5, size=n_vars)
    A = np.vstack([A0, np.ones(n_vars)])
    b = A @ xhat
    c = rng.normal(size=n_vars)
    c /= np.linalg.norm(c)
    return {
        "dimension": n_vars,
        "objective": [float(v) for v in c],
        "affine": {
            "rows": [[float(v) for v in row] for row in A],
            "rhs": [float(v) for v in b],
        },
        "interior_point": [float(v) for v in xhat],
        "cone": {"type": "orthant", "size": n_vars},
        "metadata": {"generator_seed": int(seed)},
    }


def generate_socp_segment(seed: int) -> dict:
    """Second-order-cone family with one transverse objective direction.

    Variables (x1, x2, r) with the normalization row r = 1 and 1-3 rotated
    quadratic factors, each mirror-symmetric in x2.  The symmetry puts the
    optimum on the x2 = 0 line through the interior point, which is what the
    segment oracle searches.
    """
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    factors = []
    for _ in range(k):
        p, q = rng.uniform(0.6, 1.6, size=2)
        u = rng.uniform(-0.3, 0.3)
        al = rng.uniform(-0.4, 0.4)
        margin = rng.uniform(0.5, 1.5)
        beta = u * u + margin
        Amat = np.diag([p, q])
        bvec = np.array([u, 0.0])
        alpha = np.array([al, 0.0])
        top = Amat.T @ Amat
        mid = Amat.T @ bvec - 0.5 * alpha
        corner = bvec @ bvec - beta
        B = -np.block([[top, mid.reshape(2, 1)], [mid.reshape(1, 2), np.array([[corner]])]])
        factors.append({"type": "quadratic", "matrix": [[float(v) for v in row] for row in B]})
    cone = factors[0] if k == 1 else {"type": "intersection", "parts": factors}
    return {
        "dimension": 3,
        "objective": [1.0, 0.0, 0.0],
        "affine": {"rows": [[0.0, 0.0, 1.0]], "rhs": [1.0]},
        "interior_point": [0.0, 0.0, 1.0],
        "cone": cone,
        "metadata": {"generator_seed": int(seed)},
    }


def default_warm_start(inst: HPInstance) -> np.ndarray:
    """A deterministic affine-feasible start with objective value below c.e."""
    A = inst.geometry.A
    c = inst.c
    if A.shape[0]:
        cn = c - A.T @ np.linalg.solve(A @ A.T, A @ c)
    else:
        cn = c.copy()
    norm = np.linalg.norm(cn)
    if norm <= 1e-12 * (1.0 + np.linalg.norm(c)):
        raise Unbounded("objective is constant on the affine set; no warm start direction")
    return inst.e - 0.5 * cn / max(1.0, norm)


# ---------------------------------------------------------------------------
# oracles


@dataclass(frozen=True, eq=False)
class OracleResult:
    z_star: float
    argmin: np.ndarray
    method: str  # "vertex_enumeration" | "segment_bisection"

    def to_dict(self) -> dict:
        return {
            "z_star": self.z_star,
            "argmin": [float(v) for v in self.argmin],
            "method": self.method,
        }


def oracle_lp(inst: HPInstance) -> OracleResult:
    """Brute-force vertex enumeration for instances with linear factors only.

    Each vertex is the solution of the equality rows plus a choice of tight
    factors; the minimum objective value over feasible vertices is exact for
    instances with bounded level sets.
    """
    factors = cones.linear_factors(inst.cone, inst.dim)
    if len(factors) > _MAX_LINEAR_FACTORS:
        raise TooLarge(f"{len(factors)} linear factors exceeds the enumeration cap")
    geom = inst.geometry
    A, b = geom.A, geom.b
    d = inst.dim
    need = d - A.shape[0]
    if need < 0:
        raise Infeasible("more independent equality rows than variables")
    if need > len(factors):
        raise Unbounded("not enough factors to pin a vertex; the region contains a line")
    n_combos = math.comb(len(factors), need)
    if n_combos > _MAX_COMBOS:
        raise TooLarge(f"{n_combos} vertex candidates exceeds the enumeration cap")

    fmat = np.array(factors)
    best = None
    for combo in itertools.combinations(range(len(factors)), need):
        M = np.vstack([A, fmat[list(combo)]]) if need else A
        rhs = np.concatenate([b, np.zeros(need)])
        try:
            x = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(x)):
            continue
        if np.abs(M @ x - rhs).max() > 1e-8 * (1.0 + np.abs(rhs).max()):
            continue
        slack_tol = 1e-9 * (1.0 + np.linalg.norm(x))
        if (fmat @ x).min() < -slack_tol:
            continue
        z = float(inst.c @ x)
        key = (z, tuple(x))
        if best is None or key < best[0]:
            best = (key, x)
    if best is None:
        raise Unbounded("no feasible vertex found; the region is unbounded or empty")
    return OracleResult(z_star=best[0][0], argmin=best[1], method="vertex_enumeration")


def oracle_segment(inst: HPInstance) -> OracleResult:
    """Boundary bisection along the objective's direction inside the affine set.

    Requires the one-dimensional-slice geometry (dim L = 1).  Exact when the
    instance is mirror-symmetric across the search line, as the segment
    generator guarantees; the objective is linear along the line so the
    minimum sits at the boundary crossing, located by bisection on the sign
    of the minimum eigenvalue to interval width 1e-10.
    """
    geom = inst.geometry
    if geom.dim_L != 1:
        raise DimensionMismatch(f"segment oracle needs dim L = 1, got {geom.dim_L}")
    A, c = geom.A, inst.c
    if A.shape[0]:
        cn = c - A.T @ np.linalg.solve(A @ A.T, A @ c)
    else:
        cn = c.copy()
    norm = np.linalg.norm(cn)
    if norm <= 1e-12 * (1.0 + np.linalg.norm(c)):
        w = geom.basis_L[:, 0]
    else:
        w = -cn / norm  # objective decreases along w
    e = inst.e

    hi = 1.0
    for _ in range(200):
        if inst.lambda_min(e + hi * w) < 0.0:
            break
        hi *= 2.0
    else:
        raise Unbounded("feasible ray never exits the cone")
    lo = 0.0  # feasible side
    while hi - lo > 1e-10 * (1.0 + hi):
        mid = 0.5 * (lo + hi)
        if inst.lambda_min(e + mid * w) >= 0.0:
            lo = mid
        else:
            hi = mid
    argmin = e + lo * w
    return OracleResult(z_star=float(c @ argmin), argmin=argmin, method="segment_bisection")


# ---------------------------------------------------------------------------
# gradient checking


def fd_gradient(fun, x, h):
    """Central finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.empty(x.size)
    for i in range(x.size):
        step = np.zeros(x.size)
        step[i] = h
        g[i] = (fun(x + step) - fun(x - step)) / (2.0 * h)
    return g


def _engineered_points(inst: HPInstance) -> list[np.ndarray]:
    """Points with repeated eigenvalues: scaled copies of the interior point
    (all roots equal), tied orthant ratios, and matrix blocks rebuilt with a
    repeated eigenvalue.  Kept at moderate norm so the norm-scaled step of
    the finite-difference check stays in its accurate range."""
    pts = [inst.e.copy(), 0.8 * inst.e]
    leaves = []

    def walk(cone, offset):
        if isinstance(cone, cones.Intersection):
            for p in cone.parts:
                walk(p, offset)
        elif isinstance(cone, cones.Product):
            for start, stop, sub in cone.blocks:
                walk(sub, offset + start)
        else:
            leaves.append((offset, cone))

    walk(inst.cone, 0)
    x = inst.e.copy()
    touched = False
    for offset, leaf in leaves:
        if isinstance(leaf, cones.Orthant) and leaf.dim >= 2:
            x[offset] = 1.45 * inst.e[offset]
            x[offset + 1] = 1.45 * inst.e[offset + 1]
            touched = True
        elif isinstance(leaf, cones.Psd) and leaf.order >= 2:
            m = leaf.order
            n_int = m * (m + 1) // 2
            E = cones.unsvec(inst.e[offset : offset + n_int], m)
            R = np.linalg.cholesky(E)
            vals = np.linspace(1.3, 2.5, m)
            vals[1] = vals[0]  # repeated eigenvalue
            Q, _ = np.linalg.qr(np.arange(1.0, m * m + 1.0).reshape(m, m) + np.eye(m))
            M = Q @ np.diag(vals) @ Q.T
            x[offset : offset + n_int] = cones.svec(R @ M @ R.T)
            touched = True
    if touched:
        pts.append(x)
    return pts


def gradcheck(inst: HPInstance, mu: float, trials: int, seed: int, h_scale: float = 1e-5) -> dict:
    """Compare both smoothed gradients against central finite differences.

    Samples affine-feasible points plus engineered repeated-eigenvalue
    points; reports the maximum relative error on each side, with the
    gradient norm floored at one (the gradients satisfy g . e = 1, so one
    is their natural scale).  The step is h_scale * (1 + ||x||); at small mu
    the difference oracle's truncation error scales with (h/mu)^2, so tight
    comparisons should shrink the step accordingly.
    """
    rng = np.random.default_rng(seed)
    geom = inst.geometry
    obj = smoothing.SmoothedObjective(inst, mu)

    A = geom.A
    if A.shape[0]:
        cn = inst.c - A.T @ np.linalg.solve(A @ A.T, A @ inst.c)
    else:
        cn = inst.c.copy()
    norm = np.linalg.norm(cn)
    null_cols = [geom.basis_L[:, i] for i in range(geom.dim_L)]
    if norm > 1e-12:
        null_cols.append(cn / norm)
    points = []
    for _ in range(trials):
        x = inst.e.copy()
        for col in null_cols:
            x = x + 0.35 * rng.normal() * col
        points.append(x)
    points.extend(_engineered_points(inst))

    err_f = 0.0
    err_hat = 0.0
    for x in points:
        h = h_scale * (1.0 + np.linalg.norm(x))
        g = smoothing.grad_f_mu(obj, x)
        g_fd = fd_gradient(lambda p: smoothing.f_mu(obj, p), x, h)
        err_f = max(err_f, np.linalg.norm(g - g_fd) / max(np.linalg.norm(g_fd), 1.0))
        g = smoothing.grad_hat_f_mu(obj, x)
        g_fd = fd_gradient(lambda p: smoothing.hat_f_mu(obj, p), x, h)
        err_hat = max(err_hat, np.linalg.norm(g - g_fd) / max(np.linalg.norm(g_fd), 1.0))
    return {
        "mu": mu,
        "seed": int(seed),
        "points_checked": len(points),
        "max_rel_error_max_side": err_f,
        "max_rel_error_min_side": err_hat,
    }
