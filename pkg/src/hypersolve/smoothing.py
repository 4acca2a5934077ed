"""Smoothed eigenvalue objectives and their gradients.

The smoothed maximum f_mu is the max-shifted log-sum-exp of the eigenvalues;
the smoothed minimum hat_f_mu is its reflection -f_mu(-x).  Gradients are
convex combinations of the per-root directions with softmax (resp. soft-min)
weights; a single global softmax over all leaf roots realizes the nested
composite formula exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from . import _kernels, cones, geometry

if TYPE_CHECKING:  # pragma: no cover
    from .reformulate import HPInstance

_WEIGHT_FLOOR = 1e-300


@dataclass
class GradCounter:
    """Mutable gradient-evaluation counter owned by a solver state."""

    count: int = 0


@dataclass(frozen=True, eq=False)
class SmoothedObjective:
    """A smoothing level mu attached to a problem instance (cone and direction e)."""

    instance: "HPInstance"
    mu: float

    def __post_init__(self):
        if not self.mu > 0.0:
            raise ValueError("smoothing parameter mu must be positive")


def _lse_max(vals, mults, mu):
    # max-shifted log-sum-exp with multiplicity weights
    vmax = vals.max()
    s = float(mults @ np.exp((vals - vmax) / mu))
    return float(vmax + mu * np.log(s))


def _lse_min(vals, mults, mu):
    vmin = vals.min()
    s = float(mults @ np.exp((vmin - vals) / mu))
    return float(vmin - mu * np.log(s))


def f_mu(obj: SmoothedObjective, x) -> float:
    """Smoothed maximum eigenvalue; sandwiched in [lambda_max, lambda_max + mu ln n]."""
    inst = obj.instance
    vals, mults = cones.all_eigenvalues(inst.cone, inst.e, x, inst.mult_tol)
    return _lse_max(vals, mults, obj.mu)


def hat_f_mu(obj: SmoothedObjective, x) -> float:
    """Smoothed minimum eigenvalue; sandwiched in [lambda_min - mu ln n, lambda_min]."""
    inst = obj.instance
    if isinstance(inst.cone, cones.Orthant):
        x = np.asarray(x, dtype=float)
        val, _ = _kernels.orthant_hat_eval(x, inst.e, obj.mu)
        return float(val)
    vals, mults = cones.all_eigenvalues(inst.cone, inst.e, x, inst.mult_tol)
    return _lse_min(vals, mults, obj.mu)


def _weighted_direction_sum(leaves, weights, dim):
    out = np.zeros(dim)
    pos = 0
    for offset, bdim, vals, _, dirs in leaves:
        k = vals.size
        w = weights[pos : pos + k]
        live = w >= _WEIGHT_FLOOR
        if live.any():
            out[offset : offset + bdim] += w[live] @ dirs[live]
        pos += k
    return out


def grad_f_mu(obj: SmoothedObjective, x) -> np.ndarray:
    """Gradient of f_mu: softmax-weighted combination of the root directions."""
    inst = obj.instance
    leaves = cones.leaf_eigendata(inst.cone, inst.e, x, want_dirs=True, mult_tol=inst.mult_tol)
    vals = np.concatenate([lv for (_, _, lv, _, _) in leaves])
    mults = np.concatenate([lm for (_, _, _, lm, _) in leaves])
    w = mults * np.exp((vals - vals.max()) / obj.mu)
    w /= w.sum()
    return _weighted_direction_sum(leaves, w, inst.dim)


def grad_hat_f_mu(obj: SmoothedObjective, x) -> np.ndarray:
    """Gradient of hat_f_mu: soft-min weights on the same root directions.

    By homogeneity the root directions of -x coincide with those of x, so
    this equals grad_f_mu evaluated at -x.
    """
    inst = obj.instance
    leaves = cones.leaf_eigendata(inst.cone, inst.e, x, want_dirs=True, mult_tol=inst.mult_tol)
    vals = np.concatenate([lv for (_, _, lv, _, _) in leaves])
    mults = np.concatenate([lm for (_, _, _, lm, _) in leaves])
    w = mults * np.exp((vals.min() - vals) / obj.mu)
    w /= w.sum()
    return _weighted_direction_sum(leaves, w, inst.dim)


def eval_on_affine(obj, geom: geometry.AffineGeometry, x, counter: GradCounter | None = None):
    """One smoothed-minimum evaluation: (hat_f_mu(x), P_L grad hat_f_mu(x)).

    This is the unit of gradient-cost accounting: one call increments the
    counter by exactly one.  The caller is responsible for x lying in the
    affine set.  Objects other than SmoothedObjective may be passed if they
    provide value_and_proj_grad(geom, x) (used for synthetic objectives).
    """
    if counter is not None:
        counter.count += 1
    if not isinstance(obj, SmoothedObjective):
        return obj.value_and_proj_grad(geom, x)
    inst = obj.instance
    x = np.asarray(x, dtype=float)
    if isinstance(inst.cone, cones.Orthant):
        val, grad = _kernels.orthant_hat_eval(x, inst.e, obj.mu)
        return float(val), geom.projector @ grad
    leaves = cones.leaf_eigendata(inst.cone, inst.e, x, want_dirs=True, mult_tol=inst.mult_tol)
    vals = np.concatenate([lv for (_, _, lv, _, _) in leaves])
    mults = np.concatenate([lm for (_, _, _, lm, _) in leaves])
    val = _lse_min(vals, mults, obj.mu)
    w = mults * np.exp((vals.min() - vals) / obj.mu)
    w /= w.sum()
    grad = _weighted_direction_sum(leaves, w, inst.dim)
    return val, geom.projector @ grad
