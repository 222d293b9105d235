"""Outer loop of the inexact power augmented Lagrangian method.

One outer iteration k solves the subproblem min_{x in X} L_{beta_k}(x, y_k)
to a certified stationarity residual of lambda/beta_k, takes a damped dual
ascent step along grad phi(A(x)), and multiplies the penalty by omega. The
run terminates as soon as the candidate certificate (primal residual
||A(x)||, dual residual dist(-grad f - J_A^T y_cert, N_X)) meets the
requested tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .al import ALParams, Power, al_grad, al_value, holder_modulus, phi_grad, weak_convexity_modulus
from .inner import InnerSolverConfig, Oracle, apgm_solve, ippm_solve, stationarity_certificate

# Upper bound on sum_{i>=2} 1/(i * ln^2(i+1)): partial sum to 1e6 plus the
# integral tail bound int_N^inf dx/(x ln^2 x) = 1/ln(N). Frozen here; the
# summing oracle lives in the tests.
_SERIES_PARTIAL_N = 1_000_000
_SERIES_CONSTANT: float | None = None


def _series_constant() -> float:
    global _SERIES_CONSTANT
    if _SERIES_CONSTANT is None:
        i = np.arange(2, _SERIES_PARTIAL_N + 1, dtype=float)
        _SERIES_CONSTANT = float(np.sum(1.0 / (i * np.log(i + 1.0) ** 2)) + 1.0 / math.log(_SERIES_PARTIAL_N))
    return _SERIES_CONSTANT


@dataclass
class IpalmConfig:
    """Configuration of one outer solve.

    ``lam`` is the inner-tolerance scale (tolerance at iteration k is
    lam/beta_k), ``omega`` the penalty growth factor, ``sigma1`` the initial
    dual step size and ``beta1`` the initial penalty.
    """

    x1: np.ndarray
    y1: np.ndarray
    lam: float
    omega: float
    sigma1: float
    beta1: float
    nu: Power
    eps_f: float
    eps_A: float
    inner: InnerSolverConfig = field(default_factory=InnerSolverConfig)
    max_outer: int = 40

    def __post_init__(self):
        if not isinstance(self.nu, Power):
            self.nu = Power(float(self.nu))
        if self.omega <= 1.0:
            raise ValueError("penalty growth factor omega must exceed 1")
        for name in ("lam", "sigma1", "beta1", "eps_f", "eps_A"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        self.x1 = np.asarray(self.x1, dtype=float)
        self.y1 = np.asarray(self.y1, dtype=float)


@dataclass
class OuterRecord:
    """Per-iteration snapshot of the outer loop."""

    k: int
    beta: float
    eps: float
    sigma: float
    pres: float
    dres: float
    f: float
    y_norm: float
    inner_iters: int
    grad_evals_cum: int
    x: np.ndarray
    y_prev: np.ndarray
    y_next: np.ndarray
    inner_bound: float


@dataclass
class OuterTrace:
    records: list[OuterRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])


@dataclass
class Certificate:
    """Stationarity certificate at the returned point.

    ``y_cert`` is the multiplier under which the dual residual was measured:
    the subproblem multiplier y_k + beta_k * grad phi(A(x_{k+1})), whose
    residual the inner solve controls directly. ``dres`` is exact whenever
    the feasible set supports normal-cone distances; otherwise it is a
    certified upper bound and ``dres_is_bound`` is set.
    """

    x: np.ndarray
    y_cert: np.ndarray
    pres: float
    dres: float
    dres_is_bound: bool = False


def dual_step_size(sigma1: float, a1_norm: float, ak1_norm: float, k: int, nu: Power) -> float:
    """Damped dual step size keeping the multiplier sequence bounded.

    sigma_{k+1} = sigma1 * min(1, a1^nu * ln^2(2) / (a_{k+1}^nu * (k+1) * ln^2(k+2))),
    with natural logarithms; a feasible iterate (a_{k+1} = 0) returns sigma1.
    """
    if ak1_norm == 0.0:
        return sigma1
    p = float(nu)
    damping = (a1_norm**p * math.log(2.0) ** 2) / (ak1_norm**p * (k + 1) * math.log(k + 2.0) ** 2)
    return sigma1 * min(1.0, damping)


def multiplier_update(y: np.ndarray, sigma: float, Ax: np.ndarray, nu: Power) -> np.ndarray:
    """Dual ascent step y + sigma * grad phi(A(x))."""
    y = np.asarray(y, dtype=float)
    Ax = np.asarray(Ax, dtype=float)
    if y.shape != Ax.shape:
        raise ValueError("multiplier and constraint dimensions differ")
    return y + sigma * phi_grad(Ax, nu)


def y_max_bound(y1_norm: float, sigma1: float, a1_norm: float) -> float:
    """Rigorous upper bound on sup_k ||y_k|| along any run."""
    return y1_norm + _series_constant() * sigma1 * a1_norm * math.log(2.0) ** 2


def stationarity_residuals(problem, x: np.ndarray, y: np.ndarray):
    """Primal and dual residuals (||A(x)||, dist(-grad f - J_A^T y, N_X(x))).

    Falls back to a certified projected-gradient bound on the Lagrangian when
    the set has no normal-cone distance; the returned flag marks that case.
    """
    if not problem.set.contains(x):
        raise ValueError("point not in set")
    ax = problem.A(x)
    pres = float(np.linalg.norm(ax))
    v = -problem.grad_f(x) - problem.JtA_product(x, y)
    try:
        dres = problem.set.normal_cone_dist(x, v)
        return pres, dres, False
    except NotImplementedError:
        # Bound dist(-grad_x [f + <y, A>], N_X) through one certificate step.
        lag_grad = lambda u: problem.grad_f(u) + problem.JtA_product(u, y)
        c = problem.constants
        H = c.H_f + c.H_A * float(np.linalg.norm(y))
        q = min(c.nu_f, c.nu_A)
        gamma = 1.0 / max(H, 1.0)
        _, bound = stationarity_certificate(lag_grad, problem.set, x, gamma, H, q)
        return pres, float(bound), True


def resolve_step_size(problem, cfg: IpalmConfig, beta: float, y_norm: float) -> float:
    """Resolve an "auto" APGM step: inverse Lipschitz modulus at nu = 1, shrunk.

    The nu = 1 modulus L_f + L_A*||y|| + beta*(JA_max^2 + A_max*L_A) is the
    classical augmented Lagrangian curvature bound; smaller powers keep the
    same base step divided by ``step_shrink``.
    """
    if not isinstance(cfg.inner.step_size, str):
        return float(cfg.inner.step_size) / cfg.inner.step_shrink
    c = problem.constants
    lip = c.L_f + c.L_A * y_norm + beta * (c.JA_max**2 + c.A_max * c.L_A)
    if lip <= 0:
        raise ValueError("cannot resolve auto step size: vanishing smoothness constants")
    return 1.0 / lip / cfg.inner.step_shrink


def _solve_subproblem(problem, cfg, x_start, y, beta, eps, step_hook=None, early_exit=None):
    nu = cfg.nu
    params = ALParams(nu, beta, y)
    psi = Oracle(lambda u: al_value(problem, u, params), lambda u: al_grad(problem, u, params))
    y_norm = float(np.linalg.norm(y))
    H, q = holder_modulus(problem.constants, y_norm, beta, nu)
    if cfg.inner.kind == "apgm":
        step = step_hook(beta) if step_hook is not None else resolve_step_size(problem, cfg, beta, y_norm)
        inner_cfg = InnerSolverConfig(
            kind="apgm",
            step_size=step,
            step_shrink=1.0,  # shrink already applied during resolution
            max_iterations=cfg.inner.max_iterations,
            certificate_gamma=cfg.inner.certificate_gamma,
        )
        return apgm_solve(psi, problem.set, x_start, inner_cfg, eps, H, q, early_exit=early_exit)
    rho = weak_convexity_modulus(problem.constants, y_norm, beta, nu)
    return ippm_solve(
        psi,
        problem.set,
        x_start,
        rho,
        H,
        float(nu),
        eps,
        max_outer=10_000,
        fgm_max_iterations=cfg.inner.max_iterations,
        diameter=problem.constants.D,
    )


def ipalm_solve(problem, cfg: IpalmConfig, step_hook=None):
    """Run the inexact power augmented Lagrangian method.

    Parameters
    ----------
    problem : Problem
        Oracle bundle with feasible set and smoothness constants.
    cfg : IpalmConfig
        Outer-loop parameters; ``cfg.inner`` selects and configures the
        subproblem solver.
    step_hook : callable, optional
        Maps the current penalty to an APGM step size, overriding the
        default resolution (used by experiment recipes with bespoke tunings).

    Returns
    -------
    (Certificate, OuterTrace)
        The certificate carries the multiplier y_{k+1} + beta_k * grad
        phi(A(x_{k+1})) under which the residuals were measured.

    Raises
    ------
    RuntimeError
        If an inner solve fails to reach its certified tolerance; the
        partial trace is attached to the exception.
    """
    x = problem.set.project(cfg.x1)
    y = cfg.y1.copy()
    beta = cfg.beta1
    nu = cfg.nu
    a1_norm = float(np.linalg.norm(problem.A(x)))

    trace = OuterTrace()
    grad_evals = 0
    certificate = None

    def target_reached(z, g_z, residual):
        # The subproblem gradient at z is exactly grad f + J_A^T (y + beta *
        # grad phi(A(z))), so its residual doubles as the run's dual residual
        # under the transfer multiplier; stop as soon as both targets hold.
        return residual <= cfg.eps_f and float(np.linalg.norm(problem.A(z))) <= cfg.eps_A

    for k in range(1, cfg.max_outer + 1):
        eps = cfg.lam / beta
        report = _solve_subproblem(problem, cfg, x, y, beta, eps, step_hook, early_exit=target_reached)
        grad_evals += report.grad_evals
        if not report.converged:
            err = RuntimeError(
                f"inner solver failed at outer iteration {k}: "
                f"certified bound {report.residual_bound:.3e} > tolerance {eps:.3e}"
            )
            err.trace = trace
            raise err
        x_next = report.x
        ax = problem.A(x_next)
        ak1_norm = float(np.linalg.norm(ax))
        sigma = dual_step_size(cfg.sigma1, a1_norm, ak1_norm, k, nu)
        y_next = multiplier_update(y, sigma, ax, nu)

        # Certify with the subproblem multiplier: the inner solve already
        # controls its dual residual, so the target tolerances stay reachable.
        y_cert = y + beta * phi_grad(ax, nu)
        pres, dres, dres_is_bound = stationarity_residuals(problem, x_next, y_cert)
        trace.records.append(
            OuterRecord(
                k=k,
                beta=beta,
                eps=eps,
                sigma=sigma,
                pres=pres,
                dres=dres,
                f=float(problem.f(x_next)),
                y_norm=float(np.linalg.norm(y_next)),
                inner_iters=report.iterations,
                grad_evals_cum=grad_evals,
                x=x_next,
                y_prev=y,
                y_next=y_next,
                inner_bound=report.residual_bound,
            )
        )
        x, y = x_next, y_next
        if pres <= cfg.eps_A and dres <= cfg.eps_f:
            certificate = Certificate(x_next, y_cert, pres, dres, dres_is_bound)
            break
        beta *= cfg.omega

    if certificate is None:
        last = trace.records[-1]
        certificate = Certificate(last.x, last.y_prev + last.beta * phi_grad(problem.A(last.x), nu),
                                  last.pres, last.dres, False)
    return certificate, trace


def regularity_estimate(problem, trace: OuterTrace, feas_cutoff: float = 1e-10) -> float:
    """Empirical regularity constant along a trace.

    Returns the minimum over recorded iterates of
    dist(-J_A(x)^T A(x), N_X(x)) / ||A(x)||, skipping iterates with
    ||A(x)|| below the cutoff; +inf when every iterate is feasible.
    """
    best = np.inf
    for rec in trace.records:
        ax = problem.A(rec.x)
        a_norm = float(np.linalg.norm(ax))
        if a_norm <= feas_cutoff:
            continue
        d = problem.set.normal_cone_dist(rec.x, -problem.JtA_product(rec.x, ax))
        best = min(best, d / a_norm)
    return best


@dataclass
class RateReport:
    """Outcome of the theory-vs-practice checks on one trace."""

    per_k_ok: bool
    violations: list[int]
    slope: float | None
    predicted_slope: float


def rate_check(problem, trace: OuterTrace, v_hat: float, nu: Power, omega: float, slack: float = 1e-9) -> RateReport:
    """Check the per-iteration feasibility inequality and the decay slope.

    For every record the inequality
    ||A(x_{k+1})||^nu <= (||grad f|| + ||J_A^T y_k|| + eps_{k+1}) / (v_hat * beta_k)
    is re-derived from stored quantities (it is implied by the inner
    certificate and the definition of v_hat). The slope of log ||A(x_k)||
    over the final half of the trace is compared against the predicted
    -ln(omega)/nu.
    """
    if not np.isfinite(v_hat):
        raise ValueError("rate check needs a finite empirical regularity constant")
    p = float(nu)
    violations = []
    for rec in trace.records:
        lhs = rec.pres**p
        rhs = (
            float(np.linalg.norm(problem.grad_f(rec.x)))
            + float(np.linalg.norm(problem.JtA_product(rec.x, rec.y_prev)))
            + rec.eps
        ) / (v_hat * rec.beta)
        if lhs > rhs * (1.0 + slack) + slack:
            violations.append(rec.k)

    slope = None
    pres = trace.column("pres")
    ks = trace.column("k")
    keep = pres > 0
    pres, ks = pres[keep], ks[keep]
    if len(pres) >= 4:
        half = len(pres) // 2
        slope = float(np.polyfit(ks[half:], np.log(pres[half:]), 1)[0])
    return RateReport(not violations, violations, slope, -math.log(omega) / p)
