"""Exception hierarchy for the affinecurves package."""


class AffineCurvesError(Exception):
    """Base class for all errors raised by this package."""


class ModelValidationError(AffineCurvesError):
    """A model failed structural validation and was refused downstream."""


class ModelSpecError(AffineCurvesError, ValueError):
    """A model specification file or mapping violates the schema."""


class DomainEscapeError(AffineCurvesError):
    """B(x) left the effective domain of F or R during integration."""


class NonFiniteError(AffineCurvesError):
    """A numerical evaluation overflowed or the integrator failed hard."""


class UnsupportedModelError(AffineCurvesError):
    """Operation is only available for specific built-in model kinds."""


class NoNegativeRootError(AffineCurvesError):
    """R(u) = 1 has no negative root: quasi-mean-reversion is zero and the
    shape machinery does not apply."""


class DerivativeUnavailableError(AffineCurvesError):
    """A required derivative evaluation is non-finite or ill-signed."""


class QuadratureFailureError(AffineCurvesError):
    """Adaptive quadrature could not reach the requested tolerance."""


class ThresholdOrderingError(AffineCurvesError):
    """Computed thresholds violate the strict ordering
    b_fw_norm < b_y_norm < b_asymp < b_inv; indicates a numerical or
    model-specification defect."""


class OutOfStateSpaceError(AffineCurvesError):
    """Short rate lies outside the model's state space."""


class ModelGenerationError(AffineCurvesError):
    """Random model generation exhausted its retry budget."""


class DeadZoneError(AffineCurvesError):
    """Every sample of a sign scan fell inside the dead zone."""
