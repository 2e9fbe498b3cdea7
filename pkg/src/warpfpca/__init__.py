"""Joint amplitude-phase functional PCA with invertible warping transforms.

Warping functions live in a curved space without vector operations;
this package maps them to square-integrable functions through one of
four invertible transformations (square-root-velocity tangent, centred
log-ratio, log-hazard, log-quantile density), runs weighted functional
PCA jointly with the registered functions, and maps results back to
valid warpings.
"""

from .exceptions import (
    ClrDomainWarning,
    DegenerateError,
    DegenerateWarning,
    EndpointError,
    GridMismatchError,
    HazardOverflowError,
    InsufficientDataError,
    MonotonicityError,
    OptimizationError,
    ParameterError,
    QuantileInversionError,
    TruncationError,
)
from .grids import (
    Grid,
    check_grid_function,
    cumulative_integral,
    inner_product,
    integrate,
    norm,
    resample,
)
from .warping import (
    check_density,
    check_warping,
    density_to_warping,
    identity_warping,
    warping_to_density,
)
from .transforms import (
    CLR,
    LOG_HAZARD,
    LOG_QUANTILE,
    SRVF,
    TRANSFORMS,
    ImageDiagnostics,
    SpherePoint,
    TangentProjection,
    WarpingTransformer,
    check_srvf,
    clr_forward,
    clr_inverse,
    density_inner,
    density_perturb,
    density_power,
    image_diagnostics,
    image_grid,
    inverse_transform_warping,
    log_hazard_forward,
    log_hazard_inverse,
    log_quantile_forward,
    log_quantile_inverse,
    probability_grid,
    srvf_forward,
    srvf_inverse,
    tangent_inverse,
    tangent_project,
    transform_warping,
)
from .fpca import FunctionalPCA, weighted_pca
from .joint import (
    ConcatenatedFunctions,
    JointAmplitudePhasePCA,
    compose,
    concatenate_functions,
    evaluate_concatenated,
    frechet_mean,
    frechet_variance,
    joint_distance,
    optimize_phase_weight,
    select_component_count,
    variance_decomposition,
)
from .datasets import (
    CounterRandom,
    make_power_warpings,
    make_toy_joint,
    power_warping,
    sample_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "check_grid_function",
    "integrate",
    "inner_product",
    "norm",
    "cumulative_integral",
    "resample",
    "check_warping",
    "check_density",
    "warping_to_density",
    "density_to_warping",
    "identity_warping",
    "SRVF",
    "CLR",
    "LOG_HAZARD",
    "LOG_QUANTILE",
    "TRANSFORMS",
    "WarpingTransformer",
    "TangentProjection",
    "SpherePoint",
    "ImageDiagnostics",
    "srvf_forward",
    "check_srvf",
    "tangent_project",
    "tangent_inverse",
    "srvf_inverse",
    "image_diagnostics",
    "clr_forward",
    "clr_inverse",
    "density_perturb",
    "density_power",
    "density_inner",
    "log_hazard_forward",
    "log_hazard_inverse",
    "log_quantile_forward",
    "log_quantile_inverse",
    "probability_grid",
    "image_grid",
    "transform_warping",
    "inverse_transform_warping",
    "FunctionalPCA",
    "weighted_pca",
    "JointAmplitudePhasePCA",
    "compose",
    "concatenate_functions",
    "evaluate_concatenated",
    "ConcatenatedFunctions",
    "select_component_count",
    "variance_decomposition",
    "frechet_mean",
    "frechet_variance",
    "joint_distance",
    "optimize_phase_weight",
    "CounterRandom",
    "sample_gamma",
    "power_warping",
    "make_power_warpings",
    "make_toy_joint",
    "GridMismatchError",
    "EndpointError",
    "MonotonicityError",
    "ParameterError",
    "InsufficientDataError",
    "TruncationError",
    "DegenerateError",
    "QuantileInversionError",
    "HazardOverflowError",
    "OptimizationError",
    "ClrDomainWarning",
    "DegenerateWarning",
]
