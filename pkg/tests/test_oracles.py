"""Verification oracles: finite differences, dense GEVP, brute-force cones."""

import numpy as np
import pytest

from power_alm.oracles import FiniteDiffConfig, brute_force_ncd, dense_gevp_min, finite_diff_grad
from power_alm.sets import BoxSet, WholeSpace


def test_finite_diff_linear_exact():
    c = np.array([1.0, -2.0, 0.5])
    g = finite_diff_grad(lambda x: c @ x, np.array([0.3, 0.7, -1.1]))
    np.testing.assert_allclose(g, c, atol=1e-9)


def test_finite_diff_quadratic_second_order():
    x = np.array([0.4, -0.9, 2.0, 1.0])
    g = finite_diff_grad(lambda u: 0.5 * u @ u, x)
    np.testing.assert_allclose(g, x, atol=1e-10)


def test_finite_diff_rejects_bad_config():
    with pytest.raises(ValueError):
        FiniteDiffConfig(h=0.0)
    with pytest.raises(ValueError):
        FiniteDiffConfig(scheme="forward")


def test_dense_gevp_diagonal_case():
    lam, x = dense_gevp_min(np.diag([1.0, 2.0]), np.eye(2))
    assert lam == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(np.abs(x), [1.0, 0.0], atol=1e-10)


def test_dense_gevp_random_pairs_residual():
    rng = np.random.Generator(np.random.Philox(3))
    for trial in range(50):
        n = int(rng.integers(3, 40))
        C = rng.normal(size=(n, n))
        C = 0.5 * (C + C.T)
        F = rng.normal(size=(n, n))
        B = F @ F.T + n * np.eye(n)
        lam, x = dense_gevp_min(C, B)
        assert x @ (B @ x) == pytest.approx(1.0, rel=1e-10)
        resid = np.linalg.norm(C @ x - lam * (B @ x))
        assert resid <= 1e-10 * max(1.0, np.linalg.norm(C, 2))
        # cross-check the eigenvalue against LAPACK on the reduced pencil
        L = np.linalg.cholesky(B)
        Linv = np.linalg.solve(L, np.eye(n))
        ref = np.linalg.eigvalsh(0.5 * (Linv @ C @ Linv.T + (Linv @ C @ Linv.T).T))[0]
        assert lam == pytest.approx(ref, abs=1e-9)


def test_dense_gevp_deterministic():
    rng = np.random.Generator(np.random.Philox(5))
    C = rng.normal(size=(12, 12))
    C = 0.5 * (C + C.T)
    B = np.eye(12) + 0.1 * np.ones((12, 12))
    lam1, x1 = dense_gevp_min(C, B)
    lam2, x2 = dense_gevp_min(C, B)
    assert lam1 == lam2
    np.testing.assert_array_equal(x1, x2)


def test_dense_gevp_rejects_indefinite_b():
    with pytest.raises(ValueError, match="SPD"):
        dense_gevp_min(np.eye(3), np.diag([1.0, -1.0, 1.0]))


def test_brute_force_ncd_zero_vector():
    assert brute_force_ncd(BoxSet.cube(-1, 1, 2), np.zeros(2), np.zeros(2)) == 0.0
    assert brute_force_ncd(WholeSpace(2), np.zeros(2), np.array([3.0, 4.0])) == pytest.approx(5.0)


def test_brute_force_ncd_dimension_guard():
    with pytest.raises(ValueError, match="dimension"):
        brute_force_ncd(BoxSet.cube(-1, 1, 4), np.zeros(4), np.zeros(4))
