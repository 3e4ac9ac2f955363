"""Threshold-based shape classification and its slope diagnostics.

Classification compares the short rate against the threshold bundle with
closed/open boundaries taken literally: `normal` on r <= threshold,
`inverse` on r >= b_inv, `humped` strictly between. No tolerance band is
applied here; fuzziness belongs to the numerical oracle.

Diagnostics expose the two functions driving the proofs of those intervals:

    k(x) = F'(B(x)) + r R'(B(x))
        -B'(x) k(x) is the forward-curve slope, and k is non-increasing,
        so its sign sequence is (+), (-), or (+,-);

    M(x) = [A(x) - x F(B(x))] + r [B(x) - x (R(B(x)) - 1)]
        x^2 times the yield-curve slope, with M(0) = 0 and
        M(x) -> c (r - b_y_norm) as x -> infinity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import OutOfStateSpaceError
from .models import AffineModel, StateSpace
from .riccati import ABCurve
from .thresholds import Thresholds

__all__ = [
    "ShapeLabel",
    "ShapeClass",
    "Diagnostics",
    "classify_yield",
    "classify_forward",
    "diagnostics",
    "classification_dict",
]


class ShapeLabel(str, enum.Enum):
    NORMAL = "normal"
    HUMPED = "humped"
    INVERSE = "inverse"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class ShapeClass:
    """A shape label, plus the hump maturity when a numerical scan found one."""

    label: ShapeLabel
    hump_location: float | None = None


def _require_in_state_space(space: StateSpace, r: float) -> None:
    if not space.contains(r):
        raise OutOfStateSpaceError(
            f"short rate {r} outside state space {space.value}"
        )


def classify_yield(th: Thresholds, r: float) -> ShapeClass:
    """Yield-curve shape: normal iff r <= b_y_norm, inverse iff r >= b_inv."""
    _require_in_state_space(th.state_space, r)
    if r <= th.b_y_norm:
        return ShapeClass(ShapeLabel.NORMAL)
    if r >= th.b_inv:
        return ShapeClass(ShapeLabel.INVERSE)
    return ShapeClass(ShapeLabel.HUMPED)


def classify_forward(th: Thresholds, r: float) -> ShapeClass:
    """Forward-curve shape: normal iff r <= b_fw_norm, inverse iff r >= b_inv."""
    _require_in_state_space(th.state_space, r)
    if r <= th.b_fw_norm:
        return ShapeClass(ShapeLabel.NORMAL)
    if r >= th.b_inv:
        return ShapeClass(ShapeLabel.INVERSE)
    return ShapeClass(ShapeLabel.HUMPED)


@dataclass(frozen=True)
class Diagnostics:
    """k and M sampled on a Riccati grid, with M's asymptotic limit."""

    xs: np.ndarray
    k_values: np.ndarray
    M_values: np.ndarray
    M_limit: float


def diagnostics(m: AffineModel, th: Thresholds, r: float, ab: ABCurve) -> Diagnostics:
    """Evaluate k(x) and M(x) on the accepted-step grid of ab."""
    _require_in_state_space(th.state_space, r)
    xs = ab.xs
    B = ab.Bs
    A = ab.As
    FB = np.asarray(m.F(B), dtype=float)
    RB = np.asarray(m.R(B), dtype=float)
    k = np.asarray(m.dF(B), dtype=float) + r * np.asarray(m.dR(B), dtype=float)
    M = (A - xs * FB) + r * (B - xs * (RB - 1.0))
    return Diagnostics(
        xs=xs,
        k_values=k,
        M_values=M,
        M_limit=th.c * (r - th.b_y_norm),
    )


def classification_dict(th: Thresholds, r: float) -> dict:
    """JSON-ready classification of both curves at short rate r."""
    return {
        "r": r,
        "yield_shape": classify_yield(th, r).label.value,
        "forward_shape": classify_forward(th, r).label.value,
        "thresholds": th.as_dict(),
    }
