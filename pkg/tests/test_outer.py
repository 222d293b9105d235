"""Outer loop: dual updates, multiplier bound, residuals, full solves."""

import math

import numpy as np
import pytest

from power_alm.al import Power, phi_grad
from power_alm.inner import InnerSolverConfig
from power_alm.outer import (
    IpalmConfig,
    dual_step_size,
    ipalm_solve,
    multiplier_update,
    rate_check,
    regularity_estimate,
    stationarity_residuals,
    y_max_bound,
)
from power_alm.problems import gevp_generate, qp_generate, toy_generate
from power_alm.sets import ConvexSet, WholeSpace


def test_dual_step_size_values():
    assert dual_step_size(10.0, 1.0, 0.0, 3, Power(0.5)) == 10.0
    got = dual_step_size(10.0, 1.0, 1.0, 1, Power(1.0))
    assert got == pytest.approx(10.0 * math.log(2.0) ** 2 / (2.0 * math.log(3.0) ** 2), rel=1e-13)
    assert got == pytest.approx(1.9903617697086997, rel=1e-12)
    # vanishing step as the violation blows up
    assert dual_step_size(10.0, 1.0, 1e12, 1, Power(0.5)) < 1e-5
    # the damping never amplifies
    for k in range(1, 20):
        assert dual_step_size(3.0, 2.0, 0.7, k, Power(0.8)) <= 3.0


def test_multiplier_update_cases():
    y = np.array([1.0, -1.0])
    ax = np.array([0.5, 0.25])
    np.testing.assert_allclose(multiplier_update(y, 2.0, ax, Power(1.0)), y + 2.0 * ax, rtol=1e-14)
    np.testing.assert_allclose(multiplier_update(y, 5.0, np.zeros(2), Power(0.5)), y, rtol=0)
    got = multiplier_update(np.zeros(2), 2.0, np.array([3.0, 4.0]), Power(0.5))
    np.testing.assert_allclose(got, np.array([3.0, 4.0]) * 2.0 / np.sqrt(5.0), rtol=1e-12)
    np.testing.assert_allclose(got, [2.6832815729997477, 3.577708763999663], rtol=1e-12)


def test_y_max_bound_against_series_oracle():
    assert y_max_bound(3.0, 2.0, 0.0) == 3.0
    # independent evaluation: partial sum plus integral tail bound
    i = np.arange(2, 1_000_001, dtype=float)
    partial = float(np.sum(1.0 / (i * np.log(i + 1.0) ** 2)))
    tail = 1.0 / math.log(1_000_000)
    got = y_max_bound(0.0, 1.0, 1.0)
    assert partial * math.log(2.0) ** 2 <= got  # rigorous upper bound on the series
    assert got == pytest.approx((partial + tail) * math.log(2.0) ** 2, rel=1e-9)


def test_stationarity_residuals_gevp_eigenpair():
    prob = gevp_generate(12, 9, b_mode="triangular")
    lam_min = prob.f_star
    # recover the reference eigenvector from the oracle
    from power_alm.oracles import dense_gevp_min

    lam, x_star = dense_gevp_min(prob.data["C"], prob.data["B"])
    pres, dres, is_bound = stationarity_residuals(prob, x_star, np.array([-lam]))
    assert lam == pytest.approx(lam_min, abs=1e-12)
    assert pres < 1e-10
    assert dres < 1e-8
    assert not is_bound


def test_stationarity_residuals_feasible_zero_multiplier():
    prob = toy_generate()
    x = np.array([1.0])
    pres, dres, _ = stationarity_residuals(prob, x, np.zeros(1))
    assert pres == 0.0
    assert dres == prob.set.normal_cone_dist(x, -prob.grad_f(x))


def test_stationarity_residuals_bound_fallback():
    class OpaqueInterval(ConvexSet):
        dim = 1

        def project(self, x):
            return np.clip(x, -2.0, 2.0)

        def diameter(self):
            return 4.0

    prob = toy_generate()
    prob.set = OpaqueInterval()
    pres, dres, is_bound = stationarity_residuals(prob, np.array([0.5]), np.array([1.0]))
    assert is_bound
    # truth: |grad f + J^T y| = 1 at an interior point
    assert dres >= 1.0 - 1e-12


def _toy_config(nu=1.0, **kw):
    defaults = dict(
        x1=np.array([-2.0]),
        y1=np.zeros(1),
        lam=1.0,
        omega=2.0,
        sigma1=2.0,
        beta1=1.0,
        nu=Power(nu),
        eps_f=1e-6,
        eps_A=1e-6,
        inner=InnerSolverConfig(step_size="auto", max_iterations=50_000),
        max_outer=40,
    )
    defaults.update(kw)
    return IpalmConfig(**defaults)


def test_ipalm_toy_converges_to_one():
    prob = toy_generate()
    cert, trace = ipalm_solve(prob, _toy_config())
    assert cert.pres <= 1e-6 and cert.dres <= 1e-6
    assert cert.x[0] == pytest.approx(1.0, abs=1e-5)
    assert len(trace) >= 1


@pytest.mark.parametrize("nu,shrink", [(1.0, 1.0), (0.8, 2.0), (0.6, 10.0)])
def test_ipalm_trace_invariants(nu, shrink):
    prob = qp_generate(12, 3, 17)
    cfg = IpalmConfig(
        x1=np.zeros(12),
        y1=np.zeros(3),
        lam=1.0,
        omega=3.0,
        sigma1=10.0,
        beta1=0.01,
        nu=Power(nu),
        eps_f=1e-3,
        eps_A=1e-3,
        inner=InnerSolverConfig(step_size="auto", step_shrink=shrink, max_iterations=100_000),
        max_outer=30,
    )
    cert, trace = ipalm_solve(prob, cfg)
    assert cert.pres <= 1e-3 and cert.dres <= 1e-3

    betas = trace.column("beta")
    epss = trace.column("eps")
    np.testing.assert_allclose(betas, 0.01 * 3.0 ** np.arange(len(trace)), rtol=1e-12)
    np.testing.assert_allclose(epss, 1.0 / betas, rtol=1e-12)

    # multiplier boundedness along the run
    a1 = np.linalg.norm(prob.A(prob.set.project(cfg.x1)))
    ymax = y_max_bound(0.0, 10.0, a1)
    assert np.all(trace.column("y_norm") <= ymax + 1e-9)

    # certificate multiplier reproduces the recorded dual residual
    last = trace.records[-1]
    y_cert = last.y_prev + last.beta * phi_grad(prob.A(last.x), Power(nu))
    v = -prob.grad_f(last.x) - prob.JtA_product(last.x, y_cert)
    assert prob.set.normal_cone_dist(last.x, v) == pytest.approx(last.dres, rel=1e-10)

    # inner solve warm starts: first inner residual bound below first tolerance
    assert all(r.inner_bound <= r.eps * (1 + 1e-12) for r in trace.records)


def test_ipalm_deterministic():
    prob = qp_generate(10, 2, 23)
    cfg = _toy_config()
    cfg = IpalmConfig(
        x1=np.zeros(10), y1=np.zeros(2), lam=1.0, omega=3.0, sigma1=10.0, beta1=0.01,
        nu=Power(0.8), eps_f=1e-2, eps_A=1e-2,
        inner=InnerSolverConfig(step_size="auto", step_shrink=2.0, max_iterations=100_000),
        max_outer=30,
    )
    c1, t1 = ipalm_solve(prob, cfg)
    c2, t2 = ipalm_solve(prob, cfg)
    np.testing.assert_array_equal(c1.x, c2.x)
    assert [r.grad_evals_cum for r in t1.records] == [r.grad_evals_cum for r in t2.records]


def test_regularity_estimate_and_rate_check():
    prob = qp_generate(12, 3, 29)
    cfg = IpalmConfig(
        x1=np.zeros(12), y1=np.zeros(3), lam=1.0, omega=3.0, sigma1=10.0, beta1=0.01,
        nu=Power(1.0), eps_f=1e-4, eps_A=1e-4,
        inner=InnerSolverConfig(step_size="auto", max_iterations=100_000),
        max_outer=30,
    )
    _, trace = ipalm_solve(prob, cfg)
    v_hat = regularity_estimate(prob, trace)
    assert 0.0 < v_hat < np.inf
    report = rate_check(prob, trace, v_hat, Power(1.0), 3.0)
    assert report.per_k_ok
    assert report.predicted_slope == pytest.approx(-math.log(3.0))
    if report.slope is not None:
        assert report.slope < 0


def test_regularity_estimate_linear_whole_space():
    # linear constraints on the whole space: the ratio is at least sigma_min(C)
    prob = qp_generate(8, 3, 31)
    C = prob.data["C"]
    prob.set = WholeSpace(8)
    rng = np.random.Generator(np.random.Philox(77))

    class FakeTrace:
        records = [type("R", (), {"x": rng.normal(size=8)})() for _ in range(20)]

    v_hat = regularity_estimate(prob, FakeTrace())
    assert v_hat >= np.linalg.svd(C, compute_uv=False)[-1] - 1e-10


def test_regularity_estimate_feasible_trace_is_infinite():
    prob = toy_generate()

    class FakeTrace:
        records = [type("R", (), {"x": np.array([1.0])})()]

    assert regularity_estimate(prob, FakeTrace()) == np.inf


def test_rate_check_single_record():
    prob = toy_generate()
    cfg = _toy_config(max_outer=1, eps_f=1e3, eps_A=1e3)
    _, trace = ipalm_solve(prob, cfg)
    assert len(trace) == 1
    report = rate_check(prob, trace, 1.0, Power(1.0), 2.0)
    assert report.slope is None
    assert report.per_k_ok


def test_ipalm_config_validation():
    with pytest.raises(ValueError):
        _toy_config(omega=1.0)
    with pytest.raises(ValueError):
        _toy_config(lam=0.0)
