"""Shape thresholds separating normal, humped, and inverse curves.

For a model with negative root c of R(c) = 1:

    b_fw_norm = -F'(c) / R'(c)
        forward curve is normal iff r <= b_fw_norm;

    b_y_norm  = (1/c) * integral over [c, 0] of (F(u) - F(c)) / (R(u) - 1) du
        yield curve is normal iff r <= b_y_norm;

    b_inv     = -F'(0) / R'(0) if R'(0) < 0, else +inf
        both curves are inverse iff r >= b_inv.

Between its normal threshold and b_inv a curve is humped. The four numbers
always satisfy the strict ordering

    b_fw_norm < b_y_norm < b_asymp < b_inv,

which `compute_thresholds` asserts; a violation signals a numerical or
model-specification defect rather than an admissible outcome.

The integrand of b_y_norm has a removable 0/0 singularity at u = c with
limit F'(c)/R'(c); a thin strip next to c is integrated as that constant and
the rest with adaptive Gauss-Kronrod quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import (
    DerivativeUnavailableError,
    QuadratureFailureError,
    ThresholdOrderingError,
)
from .long_end import LongEnd, find_c
from .models import AffineModel, StateSpace

__all__ = ["Thresholds", "b_fw_norm", "b_y_norm", "b_inv", "compute_thresholds"]


@dataclass(frozen=True)
class Thresholds:
    """Ordered threshold bundle for one model.

    b_inv may be math.inf (when R'(0) >= 0); it is only ever compared
    against, never used in arithmetic.
    """

    long_end: LongEnd
    b_fw_norm: float
    b_y_norm: float
    b_inv: float
    state_space: StateSpace

    @property
    def c(self) -> float:
        return self.long_end.c

    @property
    def lambda_qmr(self) -> float:
        return self.long_end.lambda_qmr

    @property
    def b_asymp(self) -> float:
        return self.long_end.b_asymp

    def as_dict(self) -> dict:
        """JSON-ready mapping; +inf is spelled as the string "inf"."""
        return {
            "c": self.c,
            "lambda": self.lambda_qmr,
            "b_asymp": self.b_asymp,
            "b_fw_norm": self.b_fw_norm,
            "b_y_norm": self.b_y_norm,
            "b_inv": "inf" if math.isinf(self.b_inv) else self.b_inv,
        }


def b_fw_norm(m: AffineModel, le: LongEnd) -> float:
    """Threshold -F'(c)/R'(c) below which the forward curve is normal."""
    fp = float(m.dF(le.c))
    rp = float(m.dR(le.c))
    if not (math.isfinite(fp) and math.isfinite(rp)):
        raise DerivativeUnavailableError(
            f"F'(c) = {fp}, R'(c) = {rp} at c = {le.c:.6g}"
        )
    if rp >= 0:
        raise DerivativeUnavailableError(
            f"R'(c) = {rp:.6g} must be negative at the root c = {le.c:.6g}"
        )
    return -fp / rp


def b_y_norm(m: AffineModel, le: LongEnd, tol: float = 1e-12) -> float:
    """Threshold (1/c) * int_c^0 (F(u) - F(c))/(R(u) - 1) du for the yield curve.

    tol bounds the absolute quadrature error of the integral before the 1/c
    scaling. Raises QuadratureFailureError if the adaptive scheme cannot
    certify it.
    """
    c = le.c
    fc = float(m.F(c))
    limit = float(m.dF(c)) / float(m.dR(c))

    def integrand(u):
        return (m.F(u) - fc) / (m.R(u) - 1.0)

    # The singularity at u = c is removable; replace the integrand by its
    # limit on a strip whose width keeps the substitution error below tol.
    eps = max(1e-10, 1e-8 * abs(c))
    strip = eps * limit

    # full_output suppresses the roundoff warning; the error estimate is
    # gated below instead, with an allowance for the float64 floor on
    # large-magnitude integrals.
    res = quad(integrand, c + eps, 0.0,
               epsabs=0.5 * tol, epsrel=0.0, limit=1000, full_output=1)
    value, abserr = res[0], res[1]
    if not math.isfinite(value) or abserr > max(tol, 2e-13 * abs(value)):
        raise QuadratureFailureError(
            f"integral error estimate {abserr:.3e} exceeds tolerance {tol:.3e}"
        )
    return (value + strip) / c


def b_inv(m: AffineModel) -> float:
    """Threshold -F'(0)/R'(0) above which curves are inverse; +inf if R'(0) >= 0."""
    rp0 = float(m.dR(0.0))
    if rp0 >= 0:
        return math.inf
    return -float(m.dF(0.0)) / rp0


def compute_thresholds(m: AffineModel, tol: float = 1e-12) -> Thresholds:
    """Assemble the full threshold bundle and assert its strict ordering."""
    m.require_valid()
    le = find_c(m)
    fw = b_fw_norm(m, le)
    y = b_y_norm(m, le, tol=tol)
    inv = b_inv(m)
    if not (fw < y < le.b_asymp < inv):
        raise ThresholdOrderingError(
            "threshold ordering b_fw_norm < b_y_norm < b_asymp < b_inv violated: "
            f"({fw!r}, {y!r}, {le.b_asymp!r}, {inv!r})"
        )
    if m.state_space is StateSpace.NON_NEGATIVE and not (inv > 0):
        raise ThresholdOrderingError(
            f"state space misses the humped band: b_inv = {inv!r} is not positive"
        )
    return Thresholds(
        long_end=le,
        b_fw_norm=fw,
        b_y_norm=y,
        b_inv=inv,
        state_space=m.state_space,
    )
