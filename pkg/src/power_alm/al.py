"""Power penalty, augmented Lagrangian evaluation, and smoothness moduli.

The augmented Lagrangian used throughout is

    L_beta(x, y) = f(x) + <y, A(x)> + beta * phi(A(x)),

where the augmenting term is a Euclidean norm raised to a power between
one and two, ``phi(r) = ||r||^(nu+1) / (nu+1)`` with ``nu`` in (0, 1].
``nu = 1`` recovers the classical quadratic penalty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Power:
    """Exponent parameter nu in (0, 1] of the augmenting term."""

    nu: float

    def __post_init__(self):
        if not (0.0 < self.nu <= 1.0):
            raise ValueError(f"power nu must lie in (0, 1], got {self.nu}")

    def __float__(self):
        return float(self.nu)


@dataclass
class ALParams:
    """Parameters (nu, beta, y) of the power augmented Lagrangian."""

    nu: Power
    beta: float
    y: np.ndarray

    def __post_init__(self):
        if not isinstance(self.nu, Power):
            self.nu = Power(float(self.nu))
        if self.beta <= 0:
            raise ValueError(f"penalty parameter beta must be positive, got {self.beta}")
        self.y = np.asarray(self.y, dtype=float)


@dataclass(frozen=True)
class SmoothnessConstants:
    """Problem smoothness data feeding step sizes and moduli.

    ``H_f, nu_f`` and ``H_A, nu_A`` are the Hoelder moduli/orders of the
    objective gradient and the constraint Jacobian; ``L_f, L_A`` their
    Lipschitz counterparts (equal to ``H_f, H_A`` when the orders are 1).
    ``A_max``, ``JA_max`` and ``gradf_max`` bound the constraint map, its
    Jacobian and the objective gradient over the feasible set (or over a
    bounding region of the iterates when the set is unbounded), and ``D``
    is the diameter of that region.
    """

    H_f: float = 0.0
    nu_f: float = 1.0
    H_A: float = 0.0
    nu_A: float = 1.0
    L_f: float = 0.0
    L_A: float = 0.0
    A_max: float = 0.0
    JA_max: float = 0.0
    gradf_max: float = 0.0
    D: float = np.inf

    def __post_init__(self):
        for name in ("H_f", "H_A", "L_f", "L_A", "A_max", "JA_max", "gradf_max"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        for name in ("nu_f", "nu_A"):
            if not (0.0 < getattr(self, name) <= 1.0):
                raise ValueError(f"{name} must lie in (0, 1]")
        if self.D <= 0:
            raise ValueError("D must be positive")


def phi_value(r: np.ndarray, nu: Power) -> float:
    """Penalty value ||r||^(nu+1) / (nu+1)."""
    p = float(nu)
    return float(np.linalg.norm(r) ** (p + 1.0) / (p + 1.0))


def phi_grad(r: np.ndarray, nu: Power) -> np.ndarray:
    """Penalty gradient r / ||r||^(1-nu), with the zero vector at r = 0.

    The origin is handled by an explicit branch, never by division; the
    returned vector has norm ||r||^nu.
    """
    r = np.asarray(r, dtype=float)
    nrm = np.linalg.norm(r)
    if nrm == 0.0:
        return np.zeros_like(r)
    return nrm ** (float(nu) - 1.0) * r


def al_value(problem, x: np.ndarray, p: ALParams) -> float:
    """Evaluate L_beta(x, y) = f(x) + <y, A(x)> + beta * phi(A(x))."""
    ax = problem.A(x)
    if ax.shape != p.y.shape:
        raise ValueError(f"multiplier dimension {p.y.shape} does not match constraint dimension {ax.shape}")
    return float(problem.f(x) + p.y @ ax + p.beta * phi_value(ax, p.nu))


def al_grad(problem, x: np.ndarray, p: ALParams) -> np.ndarray:
    """Gradient of the augmented Lagrangian in x.

    Uses Jacobian-transpose products only: grad f(x) + J_A(x)^T (y + beta * grad phi(A(x))).
    """
    ax = problem.A(x)
    if ax.shape != p.y.shape:
        raise ValueError(f"multiplier dimension {p.y.shape} does not match constraint dimension {ax.shape}")
    w = p.y + p.beta * phi_grad(ax, p.nu)
    return problem.grad_f(x) + problem.JtA_product(x, w)


def holder_modulus(c: SmoothnessConstants, y_norm: float, beta: float, nu: Power) -> tuple[float, float]:
    """Hoelder smoothness modulus (H_beta, q) of the augmented Lagrangian.

    q = min(nu_f, nu_A, nu) and

        H_beta = [H_f + H_A*||y|| + beta*(2^(1-nu)*JA_max^(1+nu) + A_max^nu*H_A)]
                 * max(1, D^(1-q)).

    Requires a finite diameter ``D``; raises otherwise.
    """
    if not np.isfinite(c.D):
        raise ValueError("compactness required: Hoelder modulus needs a finite set diameter D")
    p = float(nu)
    q = min(c.nu_f, c.nu_A, p)
    core = c.H_f + c.H_A * y_norm + beta * (2.0 ** (1.0 - p) * c.JA_max ** (1.0 + p) + c.A_max**p * c.H_A)
    return core * max(1.0, c.D ** (1.0 - q)), q


def weak_convexity_modulus(c: SmoothnessConstants, y_norm: float, beta: float, nu: Power) -> float:
    """Weak-convexity modulus rho = L_f + L_A*(||y|| + beta*A_max^nu)."""
    return c.L_f + c.L_A * (y_norm + beta * c.A_max ** float(nu))
