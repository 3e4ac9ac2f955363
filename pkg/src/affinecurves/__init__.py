"""Yield and forward curve shapes in affine one-factor short-rate models.

Riccati-based bond pricing, the shape thresholds b_fw_norm, b_y_norm,
b_asymp and b_inv, threshold-based classification, and independent
numerical and Monte Carlo verification.
"""

from .errors import (
    AffineCurvesError,
    DeadZoneError,
    DerivativeUnavailableError,
    DomainEscapeError,
    ModelGenerationError,
    ModelSpecError,
    ModelValidationError,
    NoNegativeRootError,
    NonFiniteError,
    OutOfStateSpaceError,
    QuadratureFailureError,
    ThresholdOrderingError,
    UnsupportedModelError,
)
from .models import (
    AffineModel,
    CirParams,
    GammaOuParams,
    StateSpace,
    ValidationReport,
    VasicekParams,
    load_model_file,
    make_cir,
    make_custom_model,
    make_gamma_ou,
    make_vasicek,
    model_from_spec,
    validate,
)
from .riccati import (
    ABCurve,
    Curve,
    CurveKind,
    closed_form_b,
    default_grid,
    forward_curve,
    solve_ab,
    write_curve_csv,
    yield_curve,
)
from .long_end import LongEnd, find_c
from .thresholds import Thresholds, b_fw_norm, b_inv, b_y_norm, compute_thresholds
from .classifier import (
    Diagnostics,
    ShapeClass,
    ShapeLabel,
    classification_dict,
    classify_forward,
    classify_yield,
    diagnostics,
)
from .oracle import (
    SignSequence,
    VerificationReport,
    VerificationRow,
    classify_numeric,
    random_model,
    sign_sequence,
    verify_model,
)
from .montecarlo import McEstimate, mc_bond_price, mc_check, mc_check_with_retry
from .rng import derive_seed, make_rng

__version__ = "0.1.0"
