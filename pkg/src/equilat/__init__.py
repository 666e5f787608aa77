"""Equilateral and antipodal point sets in finite-dimensional normed spaces."""

from .antipodal import (
    AntipodalCertificate,
    AntipodalError,
    AuerbachStagnation,
    BiorthogonalSystem,
    CertificationFailure,
    ChainViolation,
    antipodal_from_biorthogonal,
    auerbach_basis,
    certify_antipodal,
    normalize_biorthogonal,
    rescale_certificate,
    separation_margin,
)
from .convex import ConvexDivergence, minimize_convex
from .equilateral import (
    EquilateralReport,
    FixedPointState,
    FixedPointStatus,
    NotEquilateral,
    PreconditionError,
    find_equilateral_c0,
    make_p_points,
    petty_certificate,
    phi_step,
    search_equilateral,
    verify_equilateral,
)
from .lp import LinearProgram, LpResult, LpStatus, solve_lp
from .norms import (
    DualFunctional,
    HullGauge,
    Lp,
    MaxOf,
    NormSpec,
    Polyhedral,
    Scaled,
    SpreadingComposite,
    SubspaceExtension,
    dual_norm_eval,
    extend_norm,
    gauge_of_hull,
    norm_eval,
    norm_from_dict,
    norm_from_json,
    norming_functional,
    spreading_composite_norm,
)
from .pointset import PointSet, cube_vertices, standard_basis
from .renorm import RenormResult, bm_bound_audit, build_antipodal_renorm, corollary_renorm

__version__ = "0.1.0"
