"""Covariance operator fields of probability distributions on the unit sphere.

Two workbenches share the geometry core: nonparametric two-sample location
tests built from projections onto eigenvectors of a covariance operator
difference, and interpolation of discrete spherical distributions by
minimizing similarity-invariant operator functionals over the probability
simplex.
"""

from .errors import (
    SphereCovError,
    AntipodalPointError,
    CoincidentPointError,
    NotPositiveDefiniteError,
    DimensionMismatchError,
    FrameMismatchError,
    ObservationMismatchError,
    NotHemisphericError,
    IterationLimitError,
    TooFewPairsError,
    SampleSizeMismatchError,
)
from .geometry import (
    ANTIPODAL_EPS,
    COINCIDENT_CAP,
    TangentFrame,
    TangentVec,
    unit_point,
    unit_points,
    tangent_frame,
    geodesic_distance,
    geodesic_distances,
    log_map,
    log_map_coords,
    exp_map,
    rotation_about,
    rotate_points,
    uniform_sample,
    geographic_metric,
    geographic_point,
    geographic_basis,
)
from .spd import (
    DEFINITENESS_FLOOR,
    is_spd,
    assert_spd,
    spd_log,
    spd_exp,
    spd_inv_sqrt,
    similar_eigvals,
    h_trdif,
    h_trln2,
    h_lik,
    h_lnpr,
    make_invariant,
)
from .simplex import project_to_simplex, is_pmf, as_pmf, random_pmfs
from .fields import (
    WEIGHT_KINDS,
    CovField,
    weight_value,
    point_operator,
    point_operators,
    sample_cov_operator,
    pmf_cov_field,
    quadratic_form,
    field_distance,
    hemispheric_witness,
    intrinsic_mean,
)
from .ranktests import (
    RankTestResult,
    midranks,
    signed_rank,
    signed_rank_exact_cdf,
    rank_sum,
)
from .twosample import (
    ProjectionData,
    ProcedureOutcome,
    ScanRow,
    SampleProfile,
    projections_at,
    test_procedure_1,
    test_procedure_2,
    observation_scan,
    det_sign_areas,
    sample_profile,
    operator_profile,
)
from .sampling import RingDensity, ring_density_unnormalized, rejection_sample, rotate_sample
from .interpolation import (
    INVARIANT_KINDS,
    InterpProblem,
    PrecomputedKernels,
    InterpResult,
    make_problem,
    default_observation_points,
    precompute,
    eval_H,
    grad_H,
    hessian_H,
    solve,
    linear_interp,
    sqroot_interp,
    mse,
    fractional_anisotropy,
    rank_check,
    consistency_sweep,
    convexity_probe,
)

__version__ = "0.1.0"

__all__ = [
    "SphereCovError",
    "AntipodalPointError",
    "CoincidentPointError",
    "NotPositiveDefiniteError",
    "DimensionMismatchError",
    "FrameMismatchError",
    "ObservationMismatchError",
    "NotHemisphericError",
    "IterationLimitError",
    "TooFewPairsError",
    "SampleSizeMismatchError",
    "ANTIPODAL_EPS",
    "COINCIDENT_CAP",
    "TangentFrame",
    "TangentVec",
    "unit_point",
    "unit_points",
    "tangent_frame",
    "geodesic_distance",
    "geodesic_distances",
    "log_map",
    "log_map_coords",
    "exp_map",
    "rotation_about",
    "rotate_points",
    "uniform_sample",
    "geographic_metric",
    "geographic_point",
    "geographic_basis",
    "DEFINITENESS_FLOOR",
    "is_spd",
    "assert_spd",
    "spd_log",
    "spd_exp",
    "spd_inv_sqrt",
    "similar_eigvals",
    "h_trdif",
    "h_trln2",
    "h_lik",
    "h_lnpr",
    "make_invariant",
    "project_to_simplex",
    "is_pmf",
    "as_pmf",
    "random_pmfs",
    "WEIGHT_KINDS",
    "CovField",
    "weight_value",
    "point_operator",
    "point_operators",
    "sample_cov_operator",
    "pmf_cov_field",
    "quadratic_form",
    "field_distance",
    "hemispheric_witness",
    "intrinsic_mean",
    "RankTestResult",
    "midranks",
    "signed_rank",
    "signed_rank_exact_cdf",
    "rank_sum",
    "ProjectionData",
    "ProcedureOutcome",
    "ScanRow",
    "SampleProfile",
    "projections_at",
    "test_procedure_1",
    "test_procedure_2",
    "observation_scan",
    "det_sign_areas",
    "sample_profile",
    "operator_profile",
    "RingDensity",
    "ring_density_unnormalized",
    "rejection_sample",
    "rotate_sample",
    "INVARIANT_KINDS",
    "InterpProblem",
    "PrecomputedKernels",
    "InterpResult",
    "make_problem",
    "default_observation_points",
    "precompute",
    "eval_H",
    "grad_H",
    "hessian_H",
    "solve",
    "linear_interp",
    "sqroot_interp",
    "mse",
    "fractional_anisotropy",
    "rank_check",
    "consistency_sweep",
    "convexity_probe",
    "__version__",
]
