"""Planar convex bodies through support functions: a centro-affine curvature
flow, the associated affine operator toolbox, and verification machinery for
the inequality family around the centroid-body volume ratio."""

__version__ = "0.1.0"

from .errors import (
    AsymmetricData,
    CentroflowError,
    ClosureViolated,
    ConvexityLost,
    GridMismatch,
    NonConvex,
    NonConvexSolution,
    NonPositive,
    OptimizationFailed,
    StepUnderflow,
)
from .support import (
    CurvatureFn,
    GridFn,
    LinearMap2,
    SupportFn,
    apply_linear_map,
    area,
    curvature_function,
    disk,
    ellipse,
    make_support_fn,
    perimeter,
    radial_function,
    scaled,
)
from .ops import (
    MinkowskiSolution,
    centroid_body,
    curvature_image,
    lutwak_identity_check,
    minkowski_solve,
    mixed_volume,
    polar_area,
    polar_body,
    projection_body,
    steiner_symmetrize,
)
from .normalize import (
    BMCertificate,
    SearchConfig,
    banach_mazur_to_disk,
    pinching_to_bm_bound,
    sl2_normalize,
)
from .flow import (
    ConservationReport,
    FlowConfig,
    FlowTrace,
    HarnackReport,
    conservation_checks,
    flow_run,
    flow_speed,
    harnack_and_bounds_monitor,
    normalized_view,
)
from .lab import (
    BP_CONSTANT,
    BodySpec,
    DeficitReport,
    FuzzReport,
    StabilityResult,
    bp_deficit,
    deficit_report,
    fuzz_campaign,
    groemer_gap,
    petty_projection_product,
    random_body,
    ratio_derivative_rhs,
    santalo_product,
    stability_experiment,
)
from .bodyio import load_body, save_body

__all__ = [name for name in dir() if not name.startswith("_")]
