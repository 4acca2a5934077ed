"""Restarting two-track solve driver.

Two accelerated-method instances run in strict gradient lockstep on the same
level set: a coarse smoothing (mu1, fixed by the cone degree) whose job is to
certify progress, and a fine smoothing (mu2, set by the target accuracy)
whose iterates are projected to feasible points.  Whenever the coarse track
produces an iterate with minimum eigenvalue >= 1/2, both tracks restart from
a rescaled point with minimum eigenvalue exactly 1/4, which shrinks the gap
to the interior point's objective value by a factor >= 3/2.

There is no computable stopping certificate without the optimal value: with
an oracle hint the solve stops at the target relative gap, otherwise it runs
out its gradient budget and reports the best projected point found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import agm, cones, smoothing
from .errors import DegenerateDegree, PrematureRestart
from .reformulate import HPInstance, normalize_start, radial_project


@dataclass(frozen=True)
class MainConfig:
    """Solve parameters; z_star_hint is for testing/reporting only."""

    eps: float
    L1_est: float = 1e-8
    grad_budget: int = 1_000_000
    z_star_hint: float | None = None
    feas_tol: float | None = None
    mult_tol: float | None = None

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie strictly between 0 and 1")
        if not self.L1_est > 0.0:
            raise ValueError("L1_est must be positive")
        if self.grad_budget < 1:
            raise ValueError("grad_budget must be positive")


@dataclass(eq=False)
class SolveReport:
    """Best projected iterate and the run's accounting."""

    best_pi: np.ndarray
    best_obj: float
    rel_gap: float | None
    grad_count_total: int
    grad_count_agm1: int
    grad_count_agm2: int
    outer_iterations: int
    restart_log: list  # (ell, z_ell, grad_count at restart)
    stop_reason: str  # "target_reached" | "budget_exhausted"
    best_source: str  # which track produced best_pi ("start", "agm1", "agm2")
    mu1: float
    mu2: float

    def to_dict(self) -> dict:
        return {
            "best_pi": [float(v) for v in self.best_pi],
            "best_obj": self.best_obj,
            "rel_gap": self.rel_gap,
            "grad_count_total": self.grad_count_total,
            "grad_count_agm1": self.grad_count_agm1,
            "grad_count_agm2": self.grad_count_agm2,
            "outer_iterations": self.outer_iterations,
            "restart_log": [[int(l), float(z), int(g)] for (l, z, g) in self.restart_log],
            "stop_reason": self.stop_reason,
            "best_source": self.best_source,
            "mu1": self.mu1,
            "mu2": self.mu2,
        }


def restart_point(inst: HPInstance, w) -> np.ndarray:
    """Rescale a trigger iterate (lambda_min >= 1/2) to the next start point.

    The result has lambda_min exactly 1/4 and its objective gap to c.e is at
    least 3/2 times the trigger iterate's.
    """
    w = np.asarray(w, dtype=float)
    lam = inst.lambda_min(w)
    if lam < 0.5 - 1e-12:
        raise PrematureRestart(f"restart requested at lambda_min = {lam} < 1/2")
    return inst.e + (0.75 / (1.0 - lam)) * (w - inst.e)


def _smoothing_params(inst: HPInstance, eps: float) -> tuple[float, float]:
    n = inst.degree
    if n < 2:
        raise DegenerateDegree(
            "cone degree 1 leaves the smoothing parameters undefined; "
            "a single linear factor is already smooth and needs no solver"
        )
    ln_n = math.log(n)
    return 1.0 / (12.0 * ln_n), eps / (6.0 * ln_n)


def solve(inst: HPInstance, v_in, cfg: MainConfig, trace: list | None = None) -> SolveReport:
    """Run the restarting two-track driver from warm start v_in.

    The gradient budget counts evaluations summed over both tracks; the
    tracks' counts never differ by more than one.  When trace is a list it
    receives (grad_count_total, best_obj) at every improvement.
    """
    if cfg.mult_tol is not None:
        inst.mult_tol = cfg.mult_tol
    mu1, mu2 = _smoothing_params(inst, cfg.eps)
    geom = inst.geometry
    ce = inst.ce

    v1 = normalize_start(inst, v_in)
    z1 = float(inst.c @ v1)
    obj1 = smoothing.SmoothedObjective(inst, mu1)
    obj2 = smoothing.SmoothedObjective(inst, mu2)
    s1 = agm.agm_new(obj1, geom, cfg.L1_est, v1)
    s2 = agm.agm_new(obj2, geom, cfg.L1_est, v1)

    best_pi = radial_project(inst, v1)
    best_obj = float(inst.c @ best_pi)
    best_source = "start"
    if trace is not None:
        trace.append((0, best_obj))

    restart_log = [(1, z1, 0)]
    ell = 1

    def rel_gap_now():
        if cfg.z_star_hint is None:
            return None
        return (best_obj - cfg.z_star_hint) / (ce - cfg.z_star_hint)

    stop_reason = "budget_exhausted"
    while s1.grad_count + s2.grad_count + 2 <= cfg.grad_budget:
        out1 = agm.agm_tick(s1)
        out2 = agm.agm_tick(s2)
        assert abs(s1.grad_count - s2.grad_count) <= 1

        for out, source in ((out2, "agm2"), (out1, "agm1")):
            if not out.accepted or out.lam_min >= 1.0:
                continue
            pi = inst.e + (out.x - inst.e) / (1.0 - out.lam_min)
            obj_val = float(inst.c @ pi)
            if obj_val < best_obj:
                best_obj = obj_val
                best_pi = pi
                best_source = source
                if trace is not None:
                    trace.append((s1.grad_count + s2.grad_count, best_obj))

        if out1.accepted and out1.lam_min >= 0.5:
            v_next = restart_point(inst, out1.x)
            ell += 1
            restart_log.append((ell, float(inst.c @ v_next), s1.grad_count + s2.grad_count))
            agm.agm_reset(s1, v_next)
            agm.agm_reset(s2, v_next)

        gap = rel_gap_now()
        if gap is not None and gap <= cfg.eps:
            stop_reason = "target_reached"
            break

    return SolveReport(
        best_pi=best_pi,
        best_obj=best_obj,
        rel_gap=rel_gap_now(),
        grad_count_total=s1.grad_count + s2.grad_count,
        grad_count_agm1=s1.grad_count,
        grad_count_agm2=s2.grad_count,
        outer_iterations=ell,
        restart_log=restart_log,
        stop_reason=stop_reason,
        best_source=best_source,
        mu1=mu1,
        mu2=mu2,
    )


def solve_agm(inst: HPInstance, v_in, mu: float, cfg: MainConfig) -> SolveReport:
    """Single-track experiment mode: one accelerated run at a fixed mu.

    Uses the same normalized start and reporting as the main driver but no
    restarts; the full gradient budget goes to the one track.
    """
    if cfg.mult_tol is not None:
        inst.mult_tol = cfg.mult_tol
    geom = inst.geometry
    ce = inst.ce
    v1 = normalize_start(inst, v_in)
    z1 = float(inst.c @ v1)
    obj = smoothing.SmoothedObjective(inst, mu)
    state = agm.agm_new(obj, geom, cfg.L1_est, v1)

    best_pi = radial_project(inst, v1)
    best_obj = float(inst.c @ best_pi)
    best_source = "start"

    def rel_gap_now():
        if cfg.z_star_hint is None:
            return None
        return (best_obj - cfg.z_star_hint) / (ce - cfg.z_star_hint)

    stop_reason = "budget_exhausted"
    while state.grad_count < cfg.grad_budget:
        out = agm.agm_tick(state)
        if out.accepted and out.lam_min < 1.0:
            pi = inst.e + (out.x - inst.e) / (1.0 - out.lam_min)
            obj_val = float(inst.c @ pi)
            if obj_val < best_obj:
                best_obj = obj_val
                best_pi = pi
                best_source = "agm"
        gap = rel_gap_now()
        if gap is not None and gap <= cfg.eps:
            stop_reason = "target_reached"
            break

    return SolveReport(
        best_pi=best_pi,
        best_obj=best_obj,
        rel_gap=rel_gap_now(),
        grad_count_total=state.grad_count,
        grad_count_agm1=state.grad_count,
        grad_count_agm2=0,
        outer_iterations=1,
        restart_log=[(1, z1, 0)],
        stop_reason=stop_reason,
        best_source=best_source,
        mu1=mu,
        mu2=mu,
    )
