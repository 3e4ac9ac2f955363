"""Long-maturity behaviour: the negative root c of R(c) = 1.

When it exists, c determines the quasi-mean-reversion lambda = -1/c and the
common long-term limit of yield and forward curves, b_asymp = -F(c). If R
never reaches 1 on the negative axis the shape machinery does not apply and
NoNegativeRootError is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import NoNegativeRootError, NonFiniteError
from .models import AffineModel

__all__ = ["LongEnd", "find_c"]

_BRACKET_START = -1e-6
_MAX_DOUBLINGS = 200


@dataclass(frozen=True)
class LongEnd:
    """Negative root c of R(c) = 1, its reciprocal decay rate, and -F(c)."""

    c: float
    lambda_qmr: float
    b_asymp: float

    def __post_init__(self):
        if not (self.c < 0 and math.isfinite(self.c)):
            raise ValueError(f"c must be a negative real, got {self.c}")
        if not (self.lambda_qmr > 0):
            raise ValueError(f"lambda_qmr must be positive, got {self.lambda_qmr}")


def find_c(m: AffineModel, tol: float = 1e-13) -> LongEnd:
    """Locate the negative solution of R(c) = 1.

    Linear R is solved exactly from its slope. Otherwise the root is
    bracketed by leftward doubling from -1e-6 and polished to a residual
    |R(c) - 1| <= tol. Raises NoNegativeRootError when R stays below 1 all
    the way to the domain edge (or, for linear R, when the slope is
    non-negative).
    """
    m.require_valid()

    if m.R_is_linear:
        beta = float(m.dR(0.0))
        if beta >= 0:
            raise NoNegativeRootError(
                f"linear R with slope {beta:.6g} >= 0 has no negative root"
            )
        c = 1.0 / beta
    else:
        c = _bracket_and_solve(m, tol)

    residual = float(m.R(c)) - 1.0
    if abs(residual) > tol:
        # One guarded Newton step; the bracketing already has c nearly exact.
        slope = float(m.dR(c))
        if slope != 0 and math.isfinite(slope):
            c -= residual / slope
            residual = float(m.R(c)) - 1.0
    if abs(residual) > max(tol, 1e-12):
        raise NonFiniteError(
            f"root residual |R(c)-1| = {abs(residual):.3e} exceeds tolerance"
        )

    b_asymp = -float(m.F(c))
    if not math.isfinite(b_asymp):
        raise NonFiniteError(f"F({c:.6g}) is not finite; no long-term rate")
    return LongEnd(c=c, lambda_qmr=-1.0 / c, b_asymp=b_asymp)


def _bracket_and_solve(m: AffineModel, tol: float) -> float:
    edge = m.R_domain_lower
    g = lambda u: float(m.R(u)) - 1.0

    right = _BRACKET_START
    g_right = g(right)
    if g_right >= 0:
        # R already exceeds 1 arbitrarily close to 0; root is essentially 0-.
        # Cannot happen for validated models (R(0) = 0, R continuous), so
        # treat it as a defect.
        raise NonFiniteError("R(u) >= 1 immediately left of the origin")

    u = right
    for _ in range(_MAX_DOUBLINGS):
        u_next = u * 2.0
        hit_edge = False
        if math.isfinite(edge) and u_next <= edge:
            u_next = edge + 1e-12 * max(1.0, abs(edge))
            hit_edge = True
        val = g(u_next)
        if not math.isfinite(val):
            # Treat an overflowing R as having crossed 1.
            break
        if val >= 0:
            break
        if hit_edge:
            raise NoNegativeRootError(
                f"R stays below 1 down to its domain edge {edge:.6g}"
            )
        u = u_next
    else:
        raise NoNegativeRootError(
            f"R stays below 1 after {_MAX_DOUBLINGS} doublings from {_BRACKET_START}"
        )

    left = u_next
    if not math.isfinite(g(left)):
        left = _shrink_to_finite(g, left, u)
    eps = math.ulp(1.0)
    return float(brentq(g, left, u, xtol=1e-14, rtol=4 * eps))


def _shrink_to_finite(g, bad: float, good: float) -> float:
    """Binary-search a finite, non-negative g evaluation between bad and good."""
    for _ in range(200):
        mid = 0.5 * (bad + good)
        val = g(mid)
        if math.isfinite(val):
            if val >= 0:
                return mid
            good = mid
        else:
            bad = mid
    raise NonFiniteError("could not find a finite bracket for R(u) = 1")
