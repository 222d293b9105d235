"""Power augmented Lagrangian solver for nonconvex equality-constrained problems."""

from .al import (
    ALParams,
    Power,
    SmoothnessConstants,
    al_grad,
    al_value,
    holder_modulus,
    phi_grad,
    phi_value,
    weak_convexity_modulus,
)
from .inner import (
    InnerReport,
    InnerSolverConfig,
    Oracle,
    apgm_solve,
    fgm_sc_solve,
    ippm_solve,
    prox_grad_step,
    stationarity_certificate,
)
from .outer import (
    Certificate,
    IpalmConfig,
    OuterTrace,
    dual_step_size,
    ipalm_solve,
    multiplier_update,
    rate_check,
    regularity_estimate,
    stationarity_residuals,
    y_max_bound,
)
from .problems import (
    Problem,
    Seeded,
    basis_pursuit_generate,
    clustering_generate,
    gaussian_cluster_points,
    gevp_generate,
    load_points_csv,
    qp_generate,
    toy_generate,
)
from .sets import BallNonnegSet, BallSet, BoxSet, ConvexSet, WholeSpace

__version__ = "0.1.0"

__all__ = [
    "ALParams",
    "BallNonnegSet",
    "BallSet",
    "BoxSet",
    "Certificate",
    "ConvexSet",
    "InnerReport",
    "InnerSolverConfig",
    "IpalmConfig",
    "Oracle",
    "OuterTrace",
    "Power",
    "Problem",
    "Seeded",
    "SmoothnessConstants",
    "WholeSpace",
    "al_grad",
    "al_value",
    "apgm_solve",
    "basis_pursuit_generate",
    "clustering_generate",
    "dual_step_size",
    "fgm_sc_solve",
    "gaussian_cluster_points",
    "gevp_generate",
    "holder_modulus",
    "ipalm_solve",
    "ippm_solve",
    "load_points_csv",
    "multiplier_update",
    "phi_grad",
    "phi_value",
    "prox_grad_step",
    "qp_generate",
    "rate_check",
    "regularity_estimate",
    "stationarity_certificate",
    "stationarity_residuals",
    "toy_generate",
    "weak_convexity_modulus",
    "y_max_bound",
]
