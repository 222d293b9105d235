"""Simple convex feasible sets: projection, normal-cone distance, diameter."""

from __future__ import annotations

import numpy as np

# A coordinate or ball constraint counts as active when within this absolute
# tolerance of its bound; inner solvers land on bounds only up to solver tolerance.
ACTIVITY_TOL = 1e-9

# Membership tolerance for normal-cone queries.
MEMBERSHIP_TOL = 1e-12


class ConvexSet:
    """Closed convex set providing projection and normal-cone geometry."""

    dim: int

    def project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def normal_cone_dist(self, x: np.ndarray, v: np.ndarray) -> float:
        """Distance of v to the normal cone of the set at x (x must be in the set)."""
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        return bool(np.linalg.norm(np.asarray(x, dtype=float) - self.project(x)) <= tol)

    def _check_member(self, x: np.ndarray):
        if not self.contains(x):
            raise ValueError("point not in set")


class BoxSet(ConvexSet):
    """Box { x : lower <= x <= upper }."""

    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if self.lower.shape != self.upper.shape:
            raise ValueError("bound shapes differ")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        self.dim = self.lower.size

    @classmethod
    def cube(cls, lo: float, hi: float, dim: int) -> "BoxSet":
        return cls(np.full(dim, lo), np.full(dim, hi))

    def project(self, x):
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def normal_cone_dist(self, x, v):
        self._check_member(x)
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        at_upper = x >= self.upper - ACTIVITY_TOL
        at_lower = x <= self.lower + ACTIVITY_TOL
        # Interior coordinate: nearest cone element is 0, contributes |v_i|.
        # Active upper bound admits w_i >= 0, active lower bound w_i <= 0;
        # a pinned coordinate (lower == upper) admits any w_i.
        resid = np.abs(v)
        resid = np.where(at_upper, np.maximum(0.0, -v), resid)
        resid = np.where(at_lower, np.maximum(0.0, v), resid)
        resid = np.where(at_upper & at_lower, 0.0, resid)
        return float(np.linalg.norm(resid))

    def diameter(self):
        return float(np.linalg.norm(self.upper - self.lower))


class BallSet(ConvexSet):
    """Euclidean ball of given radius centered at the origin."""

    def __init__(self, radius: float, dim: int):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.dim = dim

    def project(self, x):
        x = np.asarray(x, dtype=float)
        nrm = np.linalg.norm(x)
        if nrm <= self.radius:
            return x.copy()
        return (self.radius / nrm) * x

    def normal_cone_dist(self, x, v):
        self._check_member(x)
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if np.linalg.norm(x) < self.radius - ACTIVITY_TOL:
            return float(np.linalg.norm(v))
        alpha = max(0.0, float(v @ x) / float(x @ x))
        return float(np.linalg.norm(v - alpha * x))

    def diameter(self):
        return 2.0 * self.radius


class BallNonnegSet(ConvexSet):
    """Intersection of the nonnegative orthant with a centered Euclidean ball."""

    def __init__(self, radius: float, dim: int):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.dim = dim

    def project(self, x):
        # Clipping to the orthant preserves the active set and the KKT system
        # of the intersection, so a radial rescale of the clipped point is optimal.
        xp = np.maximum(np.asarray(x, dtype=float), 0.0)
        nrm = np.linalg.norm(xp)
        if nrm <= self.radius:
            return xp
        return (self.radius / nrm) * xp

    def normal_cone_dist(self, x, v, max_sweeps: int = 200, tol: float = 1e-12):
        """Distance to N_X(x) = ray{x} (ball active) + { -mu : mu >= 0 on active coords }.

        Computed by alternating exact minimization over the two summands; each
        block projection is closed-form, so the scheme converges to the joint
        minimizer of the convex distance objective.
        """
        self._check_member(x)
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        ball_active = np.linalg.norm(x) >= self.radius - ACTIVITY_TOL
        coord_active = x <= ACTIVITY_TOL

        w_ray = np.zeros_like(v)
        w_orth = np.zeros_like(v)
        xx = float(x @ x)
        prev = np.inf
        for _ in range(max_sweeps):
            if ball_active and xx > 0:
                alpha = max(0.0, float((v - w_orth) @ x) / xx)
                w_ray = alpha * x
            r = v - w_ray
            w_orth = np.where(coord_active, np.minimum(r, 0.0), 0.0)
            d = float(np.linalg.norm(v - w_ray - w_orth))
            if prev - d <= tol:
                break
            prev = d
        return d

    def diameter(self):
        # Upper bound 2r; used only inside smoothness moduli.
        return 2.0 * self.radius


class WholeSpace(ConvexSet):
    """All of R^n; projection is the identity and the normal cone is {0}."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim

    def project(self, x):
        return np.asarray(x, dtype=float).copy()

    def normal_cone_dist(self, x, v):
        return float(np.linalg.norm(v))

    def diameter(self):
        return np.inf


def project(s: ConvexSet, x: np.ndarray) -> np.ndarray:
    return s.project(x)


def normal_cone_dist(s: ConvexSet, x: np.ndarray, v: np.ndarray) -> float:
    return s.normal_cone_dist(x, v)


def diameter(s: ConvexSet) -> float:
    return s.diameter()
