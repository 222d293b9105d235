"""Benchmark problem families: nonconvex QPs, generalized eigenvalue problems,
basis pursuit via a nonconvex reformulation, and Burer-Monteiro clustering.

All generators draw from a counter-based Philox stream so that identical
seeds reproduce instances bit-for-bit; matrices are regenerable from the
seed recorded in the instance metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .al import SmoothnessConstants
from .oracles import dense_gevp_min
from .sets import BallNonnegSet, BoxSet, ConvexSet, WholeSpace

# Counter-based generator identity recorded in run metadata: Philox 4x64-10
# as exposed by numpy.random.Philox, keyed by the instance seed.
GENERATOR_VERSION = "philox4x64-10/numpy"


@dataclass(frozen=True)
class Seeded:
    """64-bit seed of the named, versioned pseudorandom stream."""

    seed: int

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self.seed))


def _rng(seed) -> tuple[np.random.Generator, int]:
    if isinstance(seed, Seeded):
        return seed.generator(), seed.seed
    return Seeded(int(seed)).generator(), int(seed)


@dataclass
class Problem:
    """Oracle bundle for min_{x in X} f(x) s.t. A(x) = 0."""

    n: int
    m: int
    f: callable
    grad_f: callable
    A: callable
    JtA_product: callable
    set: ConvexSet
    constants: SmoothnessConstants
    f_star: float | None = None
    name: str = "problem"
    meta: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    def metadata(self) -> dict:
        out = {"name": self.name, "n": self.n, "m": self.m, "generator": GENERATOR_VERSION}
        out.update(self.meta)
        return out


def qp_generate(n: int, m: int, seed) -> Problem:
    """Random nonconvex QP over a box with linear equality constraints.

    f(x) = 0.5 x^T Q x + <q, x> with Q = S^T diag(lam) S, S a normalized
    standard Gaussian matrix and lam ~ N(0, 50); A(x) = Cx - b with Gaussian
    C and b = C mu for a Gaussian mu, so the affine constraint is feasible by
    construction. X = [-5, 5]^n. Draw order: lam, S, q, C, mu.
    """
    if not (n >= m >= 1):
        raise ValueError("need n >= m >= 1")
    rng, seed_val = _rng(seed)
    lam = rng.normal(scale=np.sqrt(50.0), size=n)
    S = rng.normal(size=(n, n))
    S /= np.linalg.norm(S, 2)
    M = S.T @ (lam[:, None] * S)
    Q = 0.5 * (M + M.T)  # exact symmetry regardless of rounding
    q = rng.normal(scale=np.sqrt(2.0), size=n)
    C = rng.normal(size=(m, n))
    mu = rng.normal(size=n)
    b = C @ mu

    box = BoxSet.cube(-5.0, 5.0, n)
    norm_Q = float(np.linalg.norm(Q, 2))
    norm_C = float(np.linalg.norm(C, 2))
    radius = 5.0 * np.sqrt(n)
    constants = SmoothnessConstants(
        H_f=norm_Q,
        L_f=norm_Q,
        H_A=0.0,
        L_A=0.0,
        JA_max=norm_C,
        A_max=norm_C * radius + float(np.linalg.norm(b)),
        gradf_max=norm_Q * radius + float(np.linalg.norm(q)),
        D=box.diameter(),
    )
    return Problem(
        n=n,
        m=m,
        f=lambda x: 0.5 * float(x @ (Q @ x)) + float(q @ x),
        grad_f=lambda x: Q @ x + q,
        A=lambda x: C @ x - b,
        JtA_product=lambda x, v: C.T @ v,
        set=box,
        constants=constants,
        name="qp",
        meta={"seed": seed_val, "sizes": {"n": n, "m": m}},
        data={"Q": Q, "q": q, "C": C, "b": b, "mu": mu},
    )


def gevp_generate(n: int, seed, b_mode: str = "as_paper") -> Problem:
    """Generalized eigenvalue problem min x^T C x s.t. x^T B x = 1 on R^n.

    C is the symmetrized N(0, 0.1) matrix. With ``b_mode='as_paper'`` B is
    Q^T Q for the orthonormal QR factor of a uniform(0, 1) matrix (the
    identity, as literally specified); ``'triangular'`` takes B = R^T R from
    the same decomposition, a genuinely non-identity SPD matrix. Smoothness
    constants are taken over a bounding ball of the iterates (twice the
    larger of sqrt(n) and the reference solution norm), since the feasible
    set is all of R^n.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if b_mode not in ("as_paper", "triangular"):
        raise ValueError(f"unknown b_mode {b_mode!r}")
    rng, seed_val = _rng(seed)
    Chat = rng.normal(scale=np.sqrt(0.1), size=(n, n))
    C = 0.5 * (Chat + Chat.T)
    M = rng.uniform(size=(n, n))
    Qf, Rf = np.linalg.qr(M)
    B = Qf.T @ Qf if b_mode == "as_paper" else Rf.T @ Rf
    B = 0.5 * (B + B.T)

    f_star = None
    x_star_norm = 1.0
    if n <= 1000:
        f_star, x_star = dense_gevp_min(C, B)
        x_star_norm = float(np.linalg.norm(x_star))

    radius = 2.0 * max(np.sqrt(n), x_star_norm)
    norm_C = float(np.linalg.norm(C, 2))
    norm_B = float(np.linalg.norm(B, 2))
    constants = SmoothnessConstants(
        H_f=2.0 * norm_C,
        L_f=2.0 * norm_C,
        H_A=2.0 * norm_B,
        L_A=2.0 * norm_B,
        JA_max=2.0 * norm_B * radius,
        A_max=norm_B * radius**2 + 1.0,
        gradf_max=2.0 * norm_C * radius,
        D=2.0 * radius,
    )
    return Problem(
        n=n,
        m=1,
        f=lambda x: float(x @ (C @ x)),
        grad_f=lambda x: 2.0 * (C @ x),
        A=lambda x: np.array([float(x @ (B @ x)) - 1.0]),
        JtA_product=lambda x, v: (2.0 * v[0]) * (B @ x),
        set=WholeSpace(n),
        constants=constants,
        f_star=f_star,
        name="gevp",
        meta={"seed": seed_val, "sizes": {"n": n}, "b_mode": b_mode},
        data={"C": C, "B": B},
    )


def basis_pursuit_generate(n: int, m: int, k: int, seed) -> Problem:
    """Sparse recovery through the squared-variable reformulation.

    The underdetermined system Bz = b with a k-sparse ground truth z* turns
    into min ||x||^2 s.t. [B, -B] (x о x) = b over x in R^{2n}; the positive
    and negative parts of z are the squares of the two halves of x. The
    stored reference value is ||z*||_1 (attained at the reformulation's
    image of z*, a soft reference since the solver may find other points).
    Draw order: B, support, nonzeros.
    """
    if not (1 <= k <= n):
        raise ValueError("need 1 <= k <= n")
    if not (1 <= m < n):
        raise ValueError("need 1 <= m < n")
    rng, seed_val = _rng(seed)
    B = rng.normal(size=(m, n))
    support = rng.choice(n, size=k, replace=False)
    z_star = np.zeros(n)
    z_star[support] = rng.normal(size=k)
    b = B @ z_star
    Bbar = np.hstack([B, -B])

    radius = 2.0 * max(1.0, np.sqrt(2.0 * float(np.abs(z_star).sum())))
    norm_Bbar = float(np.linalg.norm(Bbar, 2))
    constants = SmoothnessConstants(
        H_f=2.0,
        L_f=2.0,
        H_A=2.0 * norm_Bbar,
        L_A=2.0 * norm_Bbar,
        JA_max=2.0 * norm_Bbar * radius,
        A_max=norm_Bbar * radius**2 + float(np.linalg.norm(b)),
        gradf_max=2.0 * radius,
        D=2.0 * radius,
    )
    return Problem(
        n=2 * n,
        m=m,
        f=lambda x: float(x @ x),
        grad_f=lambda x: 2.0 * x,
        A=lambda x: Bbar @ (x * x) - b,
        JtA_product=lambda x, v: 2.0 * x * (Bbar.T @ v),
        set=WholeSpace(2 * n),
        constants=constants,
        f_star=float(np.abs(z_star).sum()),
        name="basis_pursuit",
        meta={"seed": seed_val, "sizes": {"n": n, "m": m, "k": k}},
        data={"B": B, "z_star": z_star, "b": b},
    )


def clustering_generate(points: np.ndarray, s: int, r: int) -> Problem:
    """Rank-r Burer-Monteiro relaxation of s-way clustering of given points.

    With pairwise distances D_ij = ||z_i - z_j|| and the stacked variable
    x = (x_1, ..., x_n) in R^{rn}, minimizes sum_ij D_ij <x_i, x_j> subject
    to x_i^T (sum_j x_j) = 1 for every i, over the intersection of the
    nonnegative orthant with the ball of radius sqrt(s). Jacobian-transpose
    products use the running sum of the blocks, O(rn) per product.
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if s < 2 or r < 1 or n < s:
        raise ValueError("need s >= 2, r >= 1 and at least s points")
    diff = points[:, None, :] - points[None, :, :]
    D = np.sqrt(np.sum(diff * diff, axis=2))

    def unstack(x):
        return x.reshape(n, r)

    def f(x):
        X = unstack(x)
        return float(np.sum((D @ X) * X))

    def grad_f(x):
        return (2.0 * (D @ unstack(x))).ravel()

    def A(x):
        X = unstack(x)
        return X @ X.sum(axis=0) - 1.0

    def JtA_product(x, v):
        X = unstack(x)
        return (v[:, None] * X.sum(axis=0)[None, :] + (v @ X)[None, :]).ravel()

    norm_D = float(np.linalg.norm(D, 2))
    constants = SmoothnessConstants(
        H_f=2.0 * norm_D,
        L_f=2.0 * norm_D,
        H_A=2.0 * np.sqrt(n),
        L_A=2.0 * np.sqrt(n),
        JA_max=2.0 * np.sqrt(n * s),
        A_max=np.sqrt(2.0 * n * (s**2 + 1.0)),
        gradf_max=2.0 * norm_D * np.sqrt(s),
        D=2.0 * np.sqrt(s),
    )
    return Problem(
        n=n * r,
        m=n,
        f=f,
        grad_f=grad_f,
        A=A,
        JtA_product=JtA_product,
        set=BallNonnegSet(np.sqrt(s), n * r),
        constants=constants,
        name="clustering",
        meta={"sizes": {"points": n, "s": s, "r": r}},
        data={"D": D, "points": points},
    )


def toy_generate() -> Problem:
    """One-dimensional sanity problem: f = 0, A(x) = x - 1, X = [-2, 2]."""
    box = BoxSet.cube(-2.0, 2.0, 1)
    constants = SmoothnessConstants(JA_max=1.0, A_max=3.0, D=4.0)
    return Problem(
        n=1,
        m=1,
        f=lambda x: 0.0,
        grad_f=lambda x: np.zeros(1),
        A=lambda x: x - 1.0,
        JtA_product=lambda x, v: v.copy(),
        set=box,
        constants=constants,
        f_star=0.0,
        name="toy",
        meta={"sizes": {"n": 1, "m": 1}},
    )


def gaussian_cluster_points(n: int, s: int, r: int, seed, center_scale: float = 4.0, spread: float = 0.5) -> np.ndarray:
    """Synthetic point cloud from s Gaussian clusters in r dimensions."""
    rng, _ = _rng(seed)
    centers = rng.normal(scale=center_scale, size=(s, r))
    labels = np.arange(n) % s
    return centers[labels] + rng.normal(scale=spread, size=(n, r))


def load_points_csv(path) -> np.ndarray:
    """Feature points from a CSV file, one point per row; header optional."""
    path = Path(path)
    with path.open() as fh:
        first = fh.readline()
    try:
        skip = 0
        [float(tok) for tok in first.strip().split(",") if tok]
    except ValueError:
        skip = 1
    return np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
