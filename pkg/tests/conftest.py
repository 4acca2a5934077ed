"""Shared instance builders for the test suite."""

import numpy as np
import pytest

import hypersolve as hs
from hypersolve import cones, harness


def bare_instance(cone, e, seed=0):
    """Instance with no affine rows (whole-space geometry), random unit objective."""
    d = cones.space_dim(cone)
    rng = np.random.default_rng(seed)
    c = rng.normal(size=d)
    c /= np.linalg.norm(c)
    return hs.HPInstance(c=c, A=np.zeros((0, d)), b=np.zeros(0), e=e, cone=cone)


def lorentz2():
    """Plane Lorentz factor: p = (r^2 - x^2)/2, direction (0, 1)."""
    return hs.Quadratic(np.diag([-1.0, 1.0])), np.array([0.0, 1.0])


def lorentz3():
    return hs.Quadratic(np.diag([-1.0, -1.0, 1.0])), np.array([0.0, 0.0, 1.0])


def psd_direction(m, seed, spread=1.0):
    """Well-conditioned positive definite direction matrix for a psd block."""
    rng = np.random.default_rng(seed)
    G = rng.normal(size=(m, m))
    E = G @ G.T
    E = spread * E / np.linalg.eigvalsh(E).max() + np.eye(m)
    return E


def cone_pool():
    """(name, cone, e) triples covering every implemented family."""
    rng = np.random.default_rng(99)
    pool = [
        ("orthant3", hs.Orthant(3), rng.uniform(1.0, 1.4, 3)),
        ("orthant10", hs.Orthant(10), rng.uniform(1.0, 1.4, 10)),
        ("halfspace", hs.Halfspace(np.array([0.5, 1.0, 0.25])), np.array([1.0, 1.0, 1.0])),
    ]
    cone, e = lorentz2()
    pool.append(("lorentz2", cone, e))
    cone, e = lorentz3()
    pool.append(("lorentz3", cone, e))
    socp = harness.instance_from_dict(harness.generate_socp_segment(5))
    pool.append(("socp3", socp.cone, socp.e))
    for m in (2, 3, 4):
        pool.append((f"psd{m}", hs.Psd(m), cones.svec(psd_direction(m, m))))
    e4 = np.ones(4)
    parts = []
    for k in range(3):
        a = np.random.default_rng(40 + k).normal(size=4)
        a /= np.linalg.norm(a)
        a += 1.2 * e4 / np.linalg.norm(e4)
        a /= np.linalg.norm(a)
        parts.append(hs.Halfspace(a))
    pool.append(("halfspaces", hs.Intersection(tuple(parts)), e4))
    blocks = (
        (0, 2, hs.Orthant(2)),
        (2, 4, hs.Quadratic(np.diag([-1.0, 1.0]))),
        (4, 7, hs.Psd(2)),
    )
    e_mix = np.concatenate([[1.0, 1.3], [0.0, 1.0], cones.svec(psd_direction(2, 7))])
    pool.append(("product", hs.Product(blocks), e_mix))
    pool.append(
        (
            "ortho_hs",
            hs.Intersection((hs.Orthant(3), hs.Halfspace(np.array([1.0, 1.0, 1.0])))),
            np.array([1.0, 1.2, 1.1]),
        )
    )
    return pool


@pytest.fixture(scope="session")
def pool():
    return cone_pool()


def fixture_lp_2var():
    """min x1 s.t. x1 + x2 = 2, x >= 0, e = (1, 1); optimum 0 at (0, 2)."""
    return hs.HPInstance(
        c=np.array([1.0, 0.0]),
        A=np.array([[1.0, 1.0]]),
        b=np.array([2.0]),
        e=np.array([1.0, 1.0]),
        cone=hs.Orthant(2),
    )


def fixture_lp_3var():
    """min x1 on the simplex slice x1 + x2 + x3 = 3, x >= 0, e = (1,1,1)."""
    return hs.HPInstance(
        c=np.array([1.0, 0.0, 0.0]),
        A=np.array([[1.0, 1.0, 1.0]]),
        b=np.array([3.0]),
        e=np.array([1.0, 1.0, 1.0]),
        cone=hs.Orthant(3),
    )


def lp_instance(seed):
    """Seeded generated LP with at least a 1-dimensional L."""
    n_vars = 4 + seed % 7  # 4..10
    n_cons = 1 + (seed // 7) % max(1, n_vars - 3)
    data = harness.generate_lp(n_vars, n_cons, seed)
    return harness.instance_from_dict(data)


def inflated_lp(delta):
    """Simplex LP whose warm start sits close to e in objective value.

    The start v1 = e + s*w with w = (-delta, -1, 1 + delta) has minimum
    eigenvalue 1/4 at s = 3/4 and objective gap (3/4)*delta, so the ratio
    (c.e - z*) / (c.e - z1) = 4 / (3*delta) is set by delta.
    """
    inst = fixture_lp_3var()
    w = np.array([-delta, -1.0, 1.0 + delta])
    v1 = inst.e + 0.75 * w
    return inst, v1
