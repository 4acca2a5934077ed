"""Hot numeric kernels.

Two implementations of each kernel are kept: the plain-Python/numpy source
function and a numba ``@njit``-compiled binding of the same source.  The
active binding is chosen at import time; set ``HYPERSOLVE_PURE_NUMPY=1`` to
force the uncompiled path (also used automatically when numba is missing).
Both paths execute the identical operation sequence, so results agree to the
last few ulps and each path is bit-deterministic run to run.
"""

from __future__ import annotations

import math
import os

import numpy as np


def _want_numba() -> bool:
    if os.environ.get("HYPERSOLVE_PURE_NUMPY", "").strip().lower() in ("1", "true", "yes"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USING_NUMBA = _want_numba()


def orthant_hat_eval_py(x, e, mu):
    """Soft-min value and gradient of the smoothed minimum coordinate ratio.

    For the nonnegative-orthant cone the eigenvalues are x_j / e_j; this
    evaluates the smoothed concave surrogate of their minimum (max-shifted
    log-sum-exp) together with its gradient, in one pass.
    """
    d = x.shape[0]
    lam = np.empty(d)
    lmin = np.inf
    for j in range(d):
        r = x[j] / e[j]
        lam[j] = r
        if r < lmin:
            lmin = r
    s = 0.0
    w = np.empty(d)
    for j in range(d):
        wj = math.exp((lmin - lam[j]) / mu)
        w[j] = wj
        s += wj
    val = lmin - mu * math.log(s)
    grad = np.empty(d)
    for j in range(d):
        wj = w[j] / s
        if wj < 1e-300:
            grad[j] = 0.0
        else:
            grad[j] = wj / e[j]
    return val, grad


def jacobi_cyclic_py(mat, off_target, max_sweeps):
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Rotates away off-diagonal entries in fixed (p, q) order until the
    off-diagonal Frobenius norm drops to ``off_target``.  Returns the
    working matrix (diagonal holds eigenvalues), the accumulated rotation
    matrix (columns are eigenvectors), and the number of sweeps used, or
    -1 if the sweep limit was hit first.
    """
    n = mat.shape[0]
    a = mat.copy()
    v = np.eye(n)
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        off = math.sqrt(2.0 * off)
        if off <= off_target:
            return a, v, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = aip - s * (aiq + tau * aip)
                        a[i, q] = aiq + s * (aip - tau * aiq)
                        a[p, i] = a[i, p]
                        a[q, i] = a[i, q]
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = vip - s * (viq + tau * vip)
                    v[i, q] = viq + s * (vip - tau * viq)
    off = 0.0
    for p in range(n - 1):
        for q in range(p + 1, n):
            off += a[p, q] * a[p, q]
    off = math.sqrt(2.0 * off)
    if off <= off_target:
        return a, v, max_sweeps
    return a, v, -1


if USING_NUMBA:
    from numba import njit

    orthant_hat_eval_jit = njit(cache=True)(orthant_hat_eval_py)
    jacobi_cyclic_jit = njit(cache=True)(jacobi_cyclic_py)
    orthant_hat_eval = orthant_hat_eval_jit
    jacobi_cyclic = jacobi_cyclic_jit
else:
    orthant_hat_eval_jit = None
    jacobi_cyclic_jit = None
    orthant_hat_eval = orthant_hat_eval_py
    jacobi_cyclic = jacobi_cyclic_py
