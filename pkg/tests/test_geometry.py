"""Affine geometry: basis of L, projector, interior radius."""

import numpy as np
import pytest

import hypersolve as hs
from hypersolve import cones, geometry
from hypersolve.errors import (
    DegenerateObjective,
    DependentRowsDropped,
    InfeasibleInteriorPoint,
    UnsupportedConeForExactRe,
)

from conftest import bare_instance, fixture_lp_3var, lorentz2


def test_build_degenerate_dimension_flag():
    geom = hs.build_geometry(
        np.array([[1.0, 1.0]]), np.array([2.0]), np.array([1.0, 0.0]), np.array([1.0, 1.0])
    )
    assert geom.dim_L == 0
    assert geom.degenerate_dimension
    assert not geom.degenerate_objective


def test_build_three_var_basis():
    geom = hs.build_geometry(
        np.array([[1.0, 1.0, 1.0]]), np.array([3.0]), np.array([1.0, 0.0, 0.0]), np.ones(3)
    )
    assert geom.dim_L == 1
    q = geom.basis_L[:, 0]
    expected = np.array([0.0, 1.0, -1.0]) / np.sqrt(2.0)
    assert np.allclose(q, expected) or np.allclose(q, -expected)


def test_infeasible_interior_point():
    with pytest.raises(InfeasibleInteriorPoint):
        hs.build_geometry(
            np.array([[1.0, 1.0]]), np.array([5.0]), np.array([1.0, 0.0]), np.array([1.0, 1.0])
        )


def test_dependent_rows_dropped_with_warning():
    A = np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 0.0, 1.0]])
    e = np.array([1.0, 1.0, 1.0])
    with pytest.warns(DependentRowsDropped):
        geom = hs.build_geometry(A, A @ e, np.array([1.0, 0.0, 0.0]), e)
    assert geom.A.shape[0] == 2
    assert geom.dropped_rows == (1,)


def test_degenerate_objective_warning():
    A = np.array([[1.0, 1.0]])
    e = np.array([1.0, 1.0])
    with pytest.warns(DegenerateObjective):
        geom = hs.build_geometry(A, A @ e, np.array([2.0, 2.0]), e)
    assert geom.degenerate_objective


def test_project_examples():
    geom = hs.build_geometry(
        np.array([[1.0, 1.0, 1.0]]), np.array([3.0]), np.array([1.0, 0.0, 0.0]), np.ones(3)
    )
    g_in = geom.basis_L[:, 0] * 1.7
    np.testing.assert_allclose(hs.project_L(geom, g_in), g_in, atol=1e-12)
    np.testing.assert_allclose(hs.project_L(geom, geom.c), np.zeros(3), atol=1e-12)
    np.testing.assert_allclose(
        hs.project_L(geom, np.array([0.0, 1.0, 0.0])), [0.0, 0.5, -0.5], atol=1e-12
    )


def test_projector_properties():
    rng = np.random.default_rng(3)
    for trial in range(5):
        d = 8
        A = rng.normal(size=(3, d))
        e = rng.normal(size=d)
        b = A @ e
        c = rng.normal(size=d)
        geom = hs.build_geometry(A, b, c, e)
        # orthonormal columns, annihilated by A and c
        QtQ = geom.basis_L.T @ geom.basis_L
        np.testing.assert_allclose(QtQ, np.eye(geom.dim_L), atol=1e-12)
        assert np.abs(geom.A @ geom.basis_L).max() <= 1e-10 * max(1.0, np.abs(A).max())
        assert np.abs(geom.c @ geom.basis_L).max() <= 1e-10 * max(1.0, np.abs(c).max())
        for _ in range(5):
            g = rng.normal(size=d)
            u = rng.normal(size=d)
            pg = hs.project_L(geom, g)
            # idempotent and self-adjoint
            assert np.linalg.norm(hs.project_L(geom, pg) - pg) <= 1e-10 * (1 + np.linalg.norm(g))
            assert float(pg @ u) == pytest.approx(float(g @ hs.project_L(geom, u)), abs=1e-10)
            # adding a projected vector preserves the level set
            x = e + hs.project_L(geom, rng.normal(size=d))
            z = float(c @ x)
            x2 = x + pg
            assert hs.affine_residual(geom, x2) <= 1e-10 * (1 + np.abs(b).max())
            assert float(c @ x2) == pytest.approx(z, abs=1e-9 * (1 + abs(z)))


def test_affine_residual_examples():
    inst = fixture_lp_3var()
    geom = inst.geometry
    assert hs.affine_residual(geom, inst.e) == 0.0
    v = geom.basis_L[:, 0]
    assert hs.affine_residual(geom, inst.e + 2.3 * v) <= 1e-12
    assert hs.affine_residual(geom, inst.e + inst.c) > 1e-3


def _re_sampling_oracle(inst, n=400):
    """Largest r such that e + r*v stays in the cone over sampled unit v in L."""
    geom = inst.geometry
    rng = np.random.default_rng(17)
    r_min = np.inf
    for _ in range(n):
        v = geom.basis_L @ rng.normal(size=geom.dim_L)
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            continue
        v /= nv
        lo, hi = 0.0, 1.0
        while inst.lambda_min(inst.e + hi * v) > 0 and hi < 1e6:
            hi *= 2.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if inst.lambda_min(inst.e + mid * v) > 0:
                lo = mid
            else:
                hi = mid
        r_min = min(r_min, lo)
    return r_min


def test_interior_radius_orthant_r2():
    inst = hs.HPInstance(
        c=np.array([1.0, 1.0]),
        A=np.zeros((0, 2)),
        b=np.zeros(0),
        e=np.array([1.0, 1.0]),
        cone=hs.Orthant(2),
    )
    r = hs.compute_r_e(inst)
    assert r == pytest.approx(np.sqrt(2.0), rel=1e-12)
    assert r == pytest.approx(_re_sampling_oracle(inst), rel=1e-8)


def test_interior_radius_halfspace_invisible_from_L():
    inst = hs.HPInstance(
        c=np.array([1.0, 0.0]),
        A=np.zeros((0, 2)),
        b=np.zeros(0),
        e=np.array([1.0, 1.0]),
        cone=hs.Halfspace(np.array([1.0, 0.0])),
    )
    # L = span{(0, 1)} and the factor normal projects to zero on it
    assert hs.compute_r_e(inst) == np.inf


def test_interior_radius_orthant_r3_vs_sampling():
    inst = fixture_lp_3var()
    r = hs.compute_r_e(inst)
    # per-factor distances (a.e)/||P_L a|| by hand: e_j / ||P_L unit_j||
    geom = inst.geometry
    expected = min(
        inst.e[j] / np.linalg.norm(hs.project_L(geom, np.eye(3)[j])) for j in range(3)
    )
    assert r == pytest.approx(expected, rel=1e-12)
    assert r == pytest.approx(_re_sampling_oracle(inst), rel=1e-7)


def test_interior_radius_ball_inside_cone():
    rng = np.random.default_rng(23)
    from conftest import lp_instance

    for seed in (0, 3, 9):
        inst = lp_instance(seed)
        r = hs.compute_r_e(inst)
        geom = inst.geometry
        for _ in range(1000):
            v = geom.basis_L @ rng.normal(size=geom.dim_L)
            nv = np.linalg.norm(v)
            if nv < 1e-12:
                continue
            assert inst.lambda_min(inst.e + r * (v / nv)) >= -1e-8


def test_interior_radius_rejects_nonlinear_leaves():
    cone, e = lorentz2()
    inst = bare_instance(cone, e)
    with pytest.raises(UnsupportedConeForExactRe):
        hs.compute_r_e(inst)
