"""Inner solvers for the augmented Lagrangian subproblem min_{x in X} psi(x).

Two routes are provided:

* ``apgm_solve`` -- an accelerated proximal gradient method (FISTA-type) with
  a monotone safeguard, terminated through a projected-gradient stationarity
  certificate.
* ``ippm_solve`` -- an inexact proximal point method for weakly convex,
  Hoelder-smooth objectives whose strongly convex proximal subproblems are
  solved by a restarted fast gradient method (``fgm_sc_solve``).

Every solver returns a certified upper bound on the projected stationarity
measure dist(-grad psi(x), N_X(x)) at the returned point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sets import ConvexSet


class Oracle:
    """Value/gradient oracle counting gradient evaluations."""

    def __init__(self, value, grad):
        self._value = value
        self._grad = grad
        self.grad_evals = 0

    def value(self, x) -> float:
        return float(self._value(x))

    def grad(self, x) -> np.ndarray:
        self.grad_evals += 1
        return self._grad(x)


class ShiftedOracle:
    """View of a parent oracle with an added proximal term rho*||x - center||^2.

    Gradient evaluations are charged to the parent's counter, since each one
    contains exactly one parent gradient call.
    """

    def __init__(self, parent, center: np.ndarray, rho: float):
        self.parent = parent
        self.center = np.asarray(center, dtype=float)
        self.rho = float(rho)

    def value(self, x) -> float:
        d = x - self.center
        return self.parent.value(x) + self.rho * float(d @ d)

    def grad(self, x) -> np.ndarray:
        return self.parent.grad(x) + (2.0 * self.rho) * (x - self.center)

    @property
    def grad_evals(self) -> int:
        return self.parent.grad_evals


@dataclass
class InnerReport:
    """Outcome of an inner solve.

    ``residual_bound`` is a certified upper bound on
    dist(-grad psi(x), N_X(x)) at the returned point ``x``; ``converged``
    implies it is at most the requested tolerance.
    """

    x: np.ndarray
    residual_bound: float
    iterations: int
    grad_evals: int
    converged: bool


@dataclass
class InnerSolverConfig:
    kind: str = "apgm"  # "apgm" or "ippm"
    step_size: float | str = "auto"
    step_shrink: float = 1.0
    max_iterations: int = 100_000
    certificate_gamma: float | str = "auto"

    def __post_init__(self):
        if self.kind not in ("apgm", "ippm"):
            raise ValueError(f"unknown inner solver kind {self.kind!r}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.step_shrink < 1.0:
            raise ValueError("step_shrink must be >= 1")


def prox_grad_step(grad, s: ConvexSet, x: np.ndarray, gamma: float) -> np.ndarray:
    """One projected gradient step: project(x - gamma * grad(x))."""
    g = grad(x) if callable(grad) else grad
    return s.project(x - gamma * g)


def certificate_gamma_cap(tol: float, H: float, q: float) -> float:
    """Largest certificate step for which displacement <= gamma*tol/2 certifies tol."""
    if H <= 0:
        return np.inf
    return tol ** ((1.0 - q) / q) / (2.0 ** (1.0 - q) * H) ** (1.0 / q)


def stationarity_certificate(grad, s: ConvexSet, x: np.ndarray, gamma: float, H: float, q: float):
    """Projected-gradient stationarity certificate.

    Takes one projected gradient step x_bar = project(x - gamma*grad(x)) and
    returns ``(x_bar, bound)`` with

        bound = H*||x_bar - x||^q + ||x_bar - x||/gamma
              >= dist(-grad psi(x_bar), N_X(x_bar)).

    The inequality follows from the optimality conditions of the projection
    step combined with the (H, q)-Hoelder continuity of the gradient; it is
    valid for any upper estimate of H.
    """
    g = grad(x) if callable(grad) else grad
    x_bar = s.project(x - gamma * g)
    step = float(np.linalg.norm(x_bar - x))
    bound = H * step**q + step / gamma
    return x_bar, bound


class _Certifier:
    """Tracks the best certified point across prox-gradient steps.

    ``attempt`` certifies the output of a step from ``base`` (gradient
    ``g_base``, step size ``gamma``). The Hoelder bound is free; when it fails
    although the scaled displacement is already below tol (H too loose, which
    happens with sampled hull constants), one extra gradient evaluation
    replaces the Hoelder term by the exact gradient deviation, which is
    always a valid bound.
    """

    def __init__(self, oracle, s: ConvexSet, tol: float, H: float, q: float):
        self.oracle = oracle
        self.s = s
        self.tol = tol
        self.H = H
        self.q = q
        self.best_x = None
        self.best_bound = np.inf

    def attempt(self, base, g_base, x_new, gamma):
        step = float(np.linalg.norm(x_new - base))
        bound = self.H * step**self.q + step / gamma
        g_new = None
        if bound > self.tol and step / gamma <= self.tol:
            g_new = self.oracle.grad(x_new)
            bound = float(np.linalg.norm(g_new - g_base)) + step / gamma
        if bound < self.best_bound:
            self.best_x, self.best_bound = x_new, bound
        return bound, g_new


def apgm_solve(
    psi,
    s: ConvexSet,
    x0: np.ndarray,
    cfg: InnerSolverConfig,
    tol: float,
    H: float,
    q: float,
    early_exit=None,
) -> InnerReport:
    """Accelerated projected gradient (FISTA-type) with monotone safeguard.

    Parameters
    ----------
    psi : Oracle
        Value/gradient oracle of the (possibly nonconvex) subproblem.
    s : ConvexSet
        Feasible set; extrapolated points are projected back onto it.
    x0 : ndarray
        Starting point.
    cfg : InnerSolverConfig
        ``step_size`` must already be numeric; the "auto" resolution rule
        needs problem constants this routine does not see.
    tol : float
        Target certified stationarity residual.
    H, q : float
        Hoelder modulus and order of grad psi on the set (certificate only).
    early_exit : callable, optional
        ``early_exit(z, grad_z, residual)`` is evaluated at every feasible
        iterate whose exact residual is known; returning True stops the solve
        at that point even though ``tol`` has not been reached (used by the
        outer loop to stop a run as soon as its own target certificate
        holds).

    The method is monotone: a prox-gradient candidate from the extrapolated
    point is rejected whenever it would increase psi, in which case the
    iterate stays put while the momentum sequence continues through the
    rejected candidate (the usual monotone-FISTA recursion; a momentum
    restart here collapses acceleration into plain descent on
    ill-conditioned faces). Every prox step doubles as a stationarity
    certificate for its output point, exact normal-cone residuals are
    checked wherever a fresh gradient is available, and when the working
    step exceeds the tolerance-dependent cap ``certificate_gamma_cap``, a
    second, capped-step certificate is formed from the same gradient.
    """
    if isinstance(cfg.step_size, str):
        raise ValueError("apgm_solve requires a numeric step size (resolve 'auto' first)")
    gamma_w = float(cfg.step_size)
    cap = certificate_gamma_cap(tol, H, q)
    gamma_c = cap if cfg.certificate_gamma == "auto" else float(cfg.certificate_gamma)
    gamma_c = min(gamma_w, gamma_c)

    evals0 = psi.grad_evals
    cert = _Certifier(psi, s, tol, H, q)

    x = s.project(np.asarray(x0, dtype=float))
    fx = psi.value(x)
    z = x
    u_prev = None
    t = 1.0
    for it in range(cfg.max_iterations + 1):
        g_z = psi.grad(z)
        # Feasible point with a fresh gradient: exact residual, the tightest
        # certified bound available.
        d = s.normal_cone_dist(z, -g_z)
        if d < cert.best_bound:
            cert.best_x, cert.best_bound = z, d
        if d <= tol or (early_exit is not None and early_exit(z, g_z, d)):
            return InnerReport(z, d, it, psi.grad_evals - evals0, True)

        u = s.project(z - gamma_w * g_z)
        bound, _ = cert.attempt(z, g_z, u, gamma_w)
        if bound <= tol:
            return InnerReport(u, bound, it, psi.grad_evals - evals0, True)
        if gamma_c < gamma_w:
            u_c = s.project(z - gamma_c * g_z)
            bound, _ = cert.attempt(z, g_z, u_c, gamma_c)
            if bound <= tol:
                return InnerReport(u_c, bound, it, psi.grad_evals - evals0, True)

        fu = psi.value(u)
        if u_prev is not None and float(g_z @ (u - u_prev)) > 0.0:
            t = 1.0  # momentum points against the gradient: adaptive restart
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        if fu <= fx:
            x_new, fx_new = u, fu
        else:
            x_new, fx_new = x, fx  # monotone safeguard: keep the better point
        z = s.project(x_new + (t / t_next) * (u - x_new) + ((t - 1.0) / t_next) * (x_new - x))
        x, fx = x_new, fx_new
        u_prev = u
        t = t_next

    return InnerReport(cert.best_x, cert.best_bound, cfg.max_iterations, psi.grad_evals - evals0, False)


def smoothed_lipschitz(H_F: float, nu: float, delta: float) -> float:
    """Effective Lipschitz constant of an (H_F, nu)-Hoelder gradient at inexactness delta."""
    if nu >= 1.0:
        return H_F
    return H_F ** (2.0 / (1.0 + nu)) * ((1.0 - nu) / ((1.0 + nu) * delta)) ** ((1.0 - nu) / (1.0 + nu))


def fgm_sc_solve(
    F,
    s: ConvexSet,
    x0: np.ndarray,
    rho: float,
    H_F: float,
    nu: float,
    tol: float,
    max_iterations: int = 100_000,
    on_cycle_end=None,
) -> InnerReport:
    """Restarted accelerated method for a rho-strongly convex, Hoelder-smooth F.

    The Hoelder gradient is handled as an inexact Lipschitz oracle at
    smoothing level delta, with working constant

        L(delta) = H_F^(2/(1+nu)) * ((1-nu)/((1+nu)*delta))^((1-nu)/(1+nu)),

    reducing to L = H_F at nu = 1. Accelerated iterations restart every
    ceil(sqrt(8 L / rho)) steps, which halves the functional gap per cycle by
    the strong-convexity restart argument. The gap target is
    ``eps_bar = (tol / H_bar)^((1+nu)/nu)`` with
    ``H_bar = H_F^(1-nu)*(2 H_F (1+H_F))^(nu/2) + sqrt(2 H_F (1+H_F))`` and
    delta = eps_bar/2; once the gap is below eps_bar, one projected gradient
    step with ``gamma = eps_bar^((1-nu)/(1+nu)) / H_F`` is guaranteed to
    certify a residual of at most tol.
    """
    Hbar = H_F ** (1.0 - nu) * (2.0 * H_F * (1.0 + H_F)) ** (nu / 2.0) + np.sqrt(2.0 * H_F * (1.0 + H_F))
    eps_bar = (tol / Hbar) ** ((1.0 + nu) / nu)
    delta = eps_bar / 2.0
    L = smoothed_lipschitz(H_F, nu, delta)
    gamma_fin = eps_bar ** ((1.0 - nu) / (1.0 + nu)) / H_F
    cycle = max(1, int(min(np.ceil(np.sqrt(8.0 * L / rho)), float(max_iterations))))

    evals0 = F.grad_evals
    best_x, best_bound = None, np.inf

    def record(point, bound):
        nonlocal best_x, best_bound
        if bound < best_bound:
            best_x, best_bound = point, bound

    x = s.project(np.asarray(x0, dtype=float))
    fx = F.value(x)
    g = F.grad(x)
    x_bar = s.project(x - gamma_fin * g)
    step = float(np.linalg.norm(x_bar - x))
    bound = H_F * step**nu + step / gamma_fin
    record(x_bar, bound)
    if bound <= tol:
        return InnerReport(x_bar, bound, 0, F.grad_evals - evals0, True)

    it = 0
    while it < max_iterations:
        u_prev = u = x
        t = 1.0
        for _ in range(cycle):
            if it >= max_iterations:
                break
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            theta = (t - 1.0) / t_next
            z = u if theta == 0.0 else s.project(u + theta * (u - u_prev))
            g_z = F.grad(z)
            nxt = s.project(z - g_z / L)
            it += 1
            step = float(np.linalg.norm(nxt - z))
            bound = H_F * step**nu + step * L
            record(nxt, bound)
            if bound <= tol:
                return InnerReport(nxt, bound, it, F.grad_evals - evals0, True)
            u_prev, u = u, nxt
            t = t_next
        fu = F.value(u)
        if fu <= fx:  # monotone restarts: never move to a worse cycle end
            x, fx = u, fu
        if on_cycle_end is not None:
            on_cycle_end(x, fx)
        g = F.grad(x)
        x_bar = s.project(x - gamma_fin * g)
        step = float(np.linalg.norm(x_bar - x))
        bound = H_F * step**nu + step / gamma_fin
        record(x_bar, bound)
        if bound <= tol:
            return InnerReport(x_bar, bound, it, F.grad_evals - evals0, True)

    return InnerReport(best_x, best_bound, it, F.grad_evals - evals0, False)


def ippm_solve(
    psi,
    s: ConvexSet,
    x0: np.ndarray,
    rho: float,
    H: float,
    nu: float,
    tol: float,
    max_outer: int = 10_000,
    fgm_max_iterations: int = 100_000,
    diameter: float | None = None,
) -> InnerReport:
    """Inexact proximal point method for a rho-weakly convex, Hoelder-smooth psi.

    Step t minimizes the rho-strongly convex model
    ``F_t = psi + rho*||. - x_t||^2`` (Hoelder modulus
    ``H_F = H + 2*rho*max(1, D^(1-nu))``) down to a certified residual of
    tol/4 via `fgm_sc_solve`, and the loop stops as soon as
    ``2*rho*||x_{t+1} - x_t|| <= tol/2``. The returned point carries the
    certified bound

        dist(-grad psi(x), N_X(x)) <= inner residual + 2*rho*||x_{t+1} - x_t||,

    which is at most tol at termination. ``iterations`` counts proximal
    steps, not inner gradient iterations.
    """
    D = s.diameter() if diameter is None else diameter
    scale = 1.0 if not np.isfinite(D) else max(1.0, D ** (1.0 - nu))
    H_F = H + 2.0 * rho * scale

    evals0 = psi.grad_evals
    x = s.project(np.asarray(x0, dtype=float))
    for t in range(1, max_outer + 1):
        F = ShiftedOracle(psi, x, rho)
        rep = fgm_sc_solve(F, s, x, rho, H_F, nu, tol / 4.0, fgm_max_iterations)
        if not rep.converged:
            return InnerReport(rep.x, np.inf, t, psi.grad_evals - evals0, False)
        move = float(np.linalg.norm(rep.x - x))
        x = rep.x
        if 2.0 * rho * move <= tol / 2.0:
            bound = rep.residual_bound + 2.0 * rho * move
            return InnerReport(x, bound, t, psi.grad_evals - evals0, bound <= tol)
    return InnerReport(x, np.inf, max_outer, psi.grad_evals - evals0, False)
