"""Accelerated gradient ascent with doubling/halving Lipschitz search.

The method maximizes the smoothed minimum-eigenvalue objective over a level
set, taking projected-gradient steps.  It is resumable at single-gradient
granularity: each tick performs exactly one gradient evaluation, so two
instances can be driven in lockstep.  A trial costs two evaluations (one at
the extrapolated point y, one at the candidate step x); a rejected trial
doubles the Lipschitz estimate L, an accepted one halves it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import geometry, smoothing
from .errors import BadStart, LipschitzOverflow

L_FLOOR = 1e-12
L_CEIL = 1e30


@dataclass(frozen=True)
class AgmTick:
    """Outcome of one tick: either an accepted iterate or search-continues."""

    accepted: bool
    x: np.ndarray | None = None
    value: float | None = None
    lam_min: float | None = None


@dataclass(eq=False)
class AGMState:
    """Resumable accelerated-method state.

    All accepted iterates and the estimate point v stay in the level set of
    the start point (objective value z); the scalar A strictly increases
    across accepted iterates.
    """

    obj: object
    geom: geometry.AffineGeometry
    L1_est: float
    mu: float
    k: int
    x_k: np.ndarray
    v: np.ndarray
    A_acc: float
    L: float
    z: float
    counter: smoothing.GradCounter
    phase: str  # "need_trial" | "await_accept"
    pending: tuple | None
    best_lambda_min: float
    history: list | None
    lam_fn: Callable | None = field(default=None, repr=False)

    @property
    def grad_count(self) -> int:
        return self.counter.count


def agm_new(obj, geom: geometry.AffineGeometry, L1_est: float, x0, record_history=False) -> AGMState:
    """Initialize the method at x0 with Lipschitz estimate L1_est.

    Requires x0 in the affine set with objective value strictly below the
    interior point's.  L is initialized to L1_est / mu.
    """
    if not L1_est > 0.0:
        raise ValueError("Lipschitz estimate must be positive")
    x0 = np.asarray(x0, dtype=float).copy()
    start_tol = max(geom.feas_tol, 1e-8 * (1.0 + np.linalg.norm(geom.b)))
    resid = geometry.affine_residual(geom, x0)
    if resid > start_tol:
        raise BadStart(f"start point affine residual {resid:.3g} exceeds {start_tol:.3g}")
    z = float(geom.c @ x0)
    ce = float(geom.c @ geom.e)
    if z >= ce:
        raise BadStart(f"start objective {z} does not improve on c.e = {ce}")
    mu = float(obj.mu)
    lam_fn = None
    if isinstance(obj, smoothing.SmoothedObjective):
        lam_fn = obj.instance.lambda_min
    return AGMState(
        obj=obj,
        geom=geom,
        L1_est=float(L1_est),
        mu=mu,
        k=0,
        x_k=x0,
        v=x0.copy(),
        A_acc=0.0,
        L=float(L1_est) / mu,
        z=z,
        counter=smoothing.GradCounter(),
        phase="need_trial",
        pending=None,
        best_lambda_min=-math.inf,
        history=[] if record_history else None,
        lam_fn=lam_fn,
    )


def agm_reset(state: AGMState, v_new) -> None:
    """Restart from a new point, keeping the iterate index and gradient counter."""
    v_new = np.asarray(v_new, dtype=float).copy()
    state.x_k = v_new
    state.v = v_new.copy()
    state.A_acc = 0.0
    state.L = state.L1_est / state.mu
    state.z = float(state.geom.c @ v_new)
    state.phase = "need_trial"
    state.pending = None


def agm_tick(state: AGMState) -> AgmTick:
    """Advance by exactly one gradient evaluation.

    A need-trial tick evaluates at the extrapolated point y and forms the
    candidate x = y + (1/L) P_L grad(y).  An await-accept tick evaluates at
    x and applies the rejection test
    <grad(x), y - x> > -(1/L) ||P_L grad(x)||^2  =>  L <- 2L, retry;
    ties accept.  Acceptance updates v <- v + a P_L grad(x), halves L
    (skipped at the floor), and advances k.
    """
    if state.phase == "need_trial":
        L = state.L
        a = (1.0 + math.sqrt(1.0 + 2.0 * state.A_acc * L)) / L
        total = state.A_acc + a
        y = (state.A_acc / total) * state.x_k + (a / total) * state.v
        _, gy = smoothing.eval_on_affine(state.obj, state.geom, y, state.counter)
        x_cand = y + gy / L
        state.pending = (a, y, x_cand)
        state.phase = "await_accept"
        return AgmTick(accepted=False)

    a, y, x_cand = state.pending
    val_x, gx = smoothing.eval_on_affine(state.obj, state.geom, x_cand, state.counter)
    lhs = float(gx @ (y - x_cand))
    imp = float(gx @ gx) / state.L  # the test's guaranteed-progress scale
    # Ties accept.  When imp sits below function-value resolution the
    # comparison is two rounding residues (e.g. at a point whose projected
    # gradient vanishes) and a noise-driven reject would double L forever,
    # so such trials count as ties.
    if lhs > -imp and imp > 1e-15 * (1.0 + abs(val_x)):
        state.L *= 2.0
        if state.L > L_CEIL:
            raise LipschitzOverflow(
                f"Lipschitz trial exceeded {L_CEIL:.1e}; the objective violates its smoothness contract"
            )
        state.phase = "need_trial"
        state.pending = None
        return AgmTick(accepted=False)

    state.x_k = x_cand
    state.v = state.v + a * gx
    state.A_acc += a
    if state.L / 2.0 >= L_FLOOR:
        state.L /= 2.0
    state.k += 1
    state.phase = "need_trial"
    state.pending = None
    lam = None
    if state.lam_fn is not None:
        lam = state.lam_fn(x_cand)
        if lam > state.best_lambda_min:
            state.best_lambda_min = lam
    if state.history is not None:
        state.history.append((state.k, val_x, state.counter.count))
    return AgmTick(accepted=True, x=x_cand, value=val_x, lam_min=lam)


@dataclass(frozen=True)
class StopCondition:
    """Stop after a gradient budget, an iterate count, or an accepted-iterate predicate."""

    max_grads: int | None = None
    max_accepted: int | None = None
    predicate: Callable[[np.ndarray], bool] | None = None


def agm_run(state: AGMState, stop: StopCondition) -> AGMState:
    """Tick until the stop condition fires; returns the (mutated) state."""
    while True:
        if stop.max_grads is not None and state.grad_count >= stop.max_grads:
            return state
        out = agm_tick(state)
        if out.accepted:
            if stop.max_accepted is not None and state.k >= stop.max_accepted:
                return state
            if stop.predicate is not None and stop.predicate(out.x):
                return state
