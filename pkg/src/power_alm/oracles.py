"""Independent verification oracles for tests and acceptance checks.

Nothing here is called from solver hot paths; these routines trade speed for
simplicity and certified behavior at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sets import ACTIVITY_TOL, BallNonnegSet, BallSet, BoxSet, ConvexSet, WholeSpace


@dataclass(frozen=True)
class FiniteDiffConfig:
    h: float = 1e-6
    scheme: str = "central"

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("step size h must be positive")
        if self.scheme != "central":
            raise ValueError("only the central scheme is supported")


def finite_diff_grad(f, x: np.ndarray, cfg: FiniteDiffConfig = FiniteDiffConfig()) -> np.ndarray:
    """Componentwise central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    e = np.zeros_like(x)
    for i in range(x.size):
        e[i] = cfg.h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * cfg.h)
        e[i] = 0.0
    return g


def _jacobi_eigh(M: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps 2x2 rotations until the off-diagonal Frobenius mass falls below
    ``tol`` relative to the matrix norm. Returns (eigenvalues, eigenvectors)
    with columns of the eigenvector matrix matching the eigenvalue order.
    """
    A = np.array(M, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(np.linalg.norm(A), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-20 * tol * scale:
                    continue
                # Classical symmetric Schur rotation annihilating A[p, q].
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:  # overflow-safe small-angle branch
                    t = 0.5 / tau
                elif tau != 0:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                vp = V[:, p].copy()
                V[:, p] = c * vp - s * V[:, q]
                V[:, q] = s * vp + c * V[:, q]
    return np.diag(A).copy(), V


def dense_gevp_min(C: np.ndarray, B: np.ndarray):
    """Smallest generalized eigenpair of (C, B) with B symmetric positive definite.

    Reduces via the Cholesky factor of B and runs a cyclic Jacobi
    eigendecomposition; the returned vector is normalized so x^T B x = 1.
    """
    C = np.asarray(C, dtype=float)
    B = np.asarray(B, dtype=float)
    n = C.shape[0]
    if n > 1000:
        raise ValueError("dense oracle limited to n <= 1000")
    try:
        L = np.linalg.cholesky(B)
    except np.linalg.LinAlgError as err:
        raise ValueError("B not SPD") from err
    Linv = np.linalg.solve(L, np.eye(n))
    M = Linv @ C @ Linv.T
    M = 0.5 * (M + M.T)
    vals, vecs = _jacobi_eigh(M)
    i = int(np.argmin(vals))
    u = vecs[:, i]
    x = np.linalg.solve(L.T, u)
    x = x / np.sqrt(x @ (B @ x))
    return float(vals[i]), x


def _grid_min_dist(v: np.ndarray, candidates: np.ndarray) -> float:
    return float(np.min(np.linalg.norm(candidates - v[None, :], axis=1)))


def brute_force_ncd(s: ConvexSet, x: np.ndarray, v: np.ndarray, grid: int = 61) -> float:
    """Grid minimization of ||v - w|| over generators of the normal cone at x.

    Valid in dimension <= 3 only; accuracy is limited by the grid resolution.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.size > 3:
        raise ValueError("brute-force oracle limited to dimension <= 3")
    vmax = 10.0 * max(np.linalg.norm(v), 1.0)

    if isinstance(s, WholeSpace):
        return float(np.linalg.norm(v))

    if isinstance(s, BoxSet):
        axes = []
        for i in range(x.size):
            if s.upper[i] - s.lower[i] <= ACTIVITY_TOL:
                axes.append(np.linspace(-vmax, vmax, 2 * grid - 1))
            elif x[i] >= s.upper[i] - ACTIVITY_TOL:
                axes.append(np.linspace(0.0, vmax, grid))
            elif x[i] <= s.lower[i] + ACTIVITY_TOL:
                axes.append(np.linspace(-vmax, 0.0, grid))
            else:
                axes.append(np.zeros(1))
        mesh = np.meshgrid(*axes, indexing="ij")
        cand = np.stack([m.ravel() for m in mesh], axis=1)
        return _grid_min_dist(v, cand)

    if isinstance(s, BallSet):
        if np.linalg.norm(x) < s.radius - ACTIVITY_TOL:
            return float(np.linalg.norm(v))
        alphas = np.linspace(0.0, vmax / max(np.linalg.norm(x), 1e-12), grid)
        cand = alphas[:, None] * x[None, :]
        return _grid_min_dist(v, cand)

    if isinstance(s, BallNonnegSet):
        if np.linalg.norm(x) >= s.radius - ACTIVITY_TOL:
            alphas = np.linspace(0.0, vmax / max(np.linalg.norm(x), 1e-12), grid)
        else:
            alphas = np.zeros(1)
        axes = [alphas]
        for i in range(x.size):
            if x[i] <= ACTIVITY_TOL:
                axes.append(np.linspace(0.0, vmax, grid))
            else:
                axes.append(np.zeros(1))
        mesh = np.meshgrid(*axes, indexing="ij")
        flat = [m.ravel() for m in mesh]
        cand = flat[0][:, None] * x[None, :]
        for i in range(x.size):
            cand[:, i] -= flat[1 + i]
        return _grid_min_dist(v, cand)

    raise TypeError(f"unsupported set type {type(s).__name__}")
