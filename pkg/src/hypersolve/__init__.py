"""First-order hyperbolic-programming solver.

The pipeline: describe a conic instance (cone algebra in :mod:`cones`,
affine geometry in :mod:`geometry`), smooth the minimum-eigenvalue
reformulation (:mod:`smoothing`, :mod:`reformulate`), and drive the
accelerated method (:mod:`agm`) under the restarting scheduler
(:mod:`mainalgo`).  Desk-scale generators and independent oracles live in
:mod:`harness`.
"""

from ._kernels import USING_NUMBA
from .agm import AGMState, StopCondition, agm_new, agm_run, agm_tick
from .cones import (
    EigenGradient,
    Halfspace,
    Intersection,
    Orthant,
    Product,
    Psd,
    Quadratic,
    Spectrum,
    degree,
    eigen_gradients,
    lambda_max,
    lambda_min,
    membership,
    seminorm_inf,
    spectrum,
    validate_interior,
)
from .geometry import AffineGeometry, affine_residual, build_geometry, compute_r_e, project_L
from .mainalgo import MainConfig, SolveReport, restart_point, solve, solve_agm
from .reformulate import (
    HPInstance,
    equivalent_opt_forward,
    gap_equivalence,
    lambda_star_of_z,
    normalize_start,
    radial_project,
)
from .smoothing import (
    GradCounter,
    SmoothedObjective,
    eval_on_affine,
    f_mu,
    grad_f_mu,
    grad_hat_f_mu,
    hat_f_mu,
)

__version__ = "0.1.0"

__all__ = [
    "AGMState",
    "AffineGeometry",
    "EigenGradient",
    "GradCounter",
    "HPInstance",
    "Halfspace",
    "Intersection",
    "MainConfig",
    "Orthant",
    "Product",
    "Psd",
    "Quadratic",
    "SmoothedObjective",
    "SolveReport",
    "Spectrum",
    "StopCondition",
    "USING_NUMBA",
    "affine_residual",
    "agm_new",
    "agm_run",
    "agm_tick",
    "build_geometry",
    "compute_r_e",
    "degree",
    "eigen_gradients",
    "equivalent_opt_forward",
    "eval_on_affine",
    "f_mu",
    "gap_equivalence",
    "grad_f_mu",
    "grad_hat_f_mu",
    "hat_f_mu",
    "lambda_max",
    "lambda_min",
    "lambda_star_of_z",
    "membership",
    "normalize_start",
    "project_L",
    "radial_project",
    "restart_point",
    "seminorm_inf",
    "solve",
    "solve_agm",
    "spectrum",
    "validate_interior",
]
