"""Scalar, complex and SPD-matrix means by inductive iterations.

Matrix arguments are square float64 arrays; functions that iterate return
``(value, trace)``.
"""

from ._core import (
    DomainError,
    InputError,
    NonConvergenceError,
    NotPositiveDefiniteError,
    NumericError,
    ShapeError,
    Trace,
    agm,
    ahm,
    ahm_iteration,
    alm_mean,
    bmp_mean,
    circumcenter,
    complex_ahm,
    elliptic_k,
    geodesic,
    geometric_mean,
    holbrook_mean,
    inductive_expectation,
    karcher_mean,
    karcher_residual,
    log_euclidean_mean,
    median,
    power_mean,
    power_mean_matrix,
    riemannian_distance,
    s_divergence,
    sample_spd,
)

__all__ = [name for name in dir() if not name.startswith("_")]
