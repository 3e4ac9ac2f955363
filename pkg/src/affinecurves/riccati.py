"""Riccati integration and curve construction.

Solves

    A'(x) = F(B(x)),      A(0) = 0,
    B'(x) = R(B(x)) - 1,  B(0) = 0,

with an embedded adaptive Runge-Kutta 4(5) scheme and derives yield and
forward curves:

    Y(x, r) = -A(x)/x - r B(x)/x
    f(x, r) = -A'(x) - r B'(x) = -F(B(x)) - r (R(B(x)) - 1)

The forward curve never differentiates numerically; it reuses the Riccati
right-hand side. Between accepted integration steps, A and B are evaluated
by cubic Hermite interpolation with the exact ODE slopes at the nodes.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    DomainEscapeError,
    NonFiniteError,
    OutOfStateSpaceError,
    UnsupportedModelError,
)
from .models import AffineModel

__all__ = [
    "ABCurve",
    "Curve",
    "CurveKind",
    "solve_ab",
    "closed_form_b",
    "yield_curve",
    "forward_curve",
    "default_grid",
    "write_curve_csv",
]

DEFAULT_X_MIN = 1e-4
DEFAULT_GRID_POINTS = 400


class CurveKind(enum.Enum):
    YIELD = "yield"
    FORWARD = "forward"


@dataclass(frozen=True)
class ABCurve:
    """Accepted-step solution of the Riccati system on [0, x_max].

    xs starts at 0 and ends at x_max; As and Bs are the log-price
    coefficients, dAs and dBs the exact ODE slopes at the nodes.
    """

    xs: np.ndarray
    As: np.ndarray
    Bs: np.ndarray
    dAs: np.ndarray
    dBs: np.ndarray

    def __post_init__(self):
        xs = self.xs
        if xs[0] != 0.0 or self.As[0] != 0.0 or self.Bs[0] != 0.0:
            raise ValueError("Riccati solution must start at A(0) = B(0) = 0")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("maturity grid must be strictly increasing")
        if np.any(np.diff(self.Bs) > 0):
            raise ValueError("B must be non-increasing")

    @property
    def x_max(self) -> float:
        return float(self.xs[-1])

    def sample(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate (A, B) at maturities x inside [0, x_max]."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(x > self.x_max * (1 + 1e-12)):
            raise ValueError(f"maturities must lie in [0, {self.x_max}]")
        x = np.minimum(x, self.x_max)
        idx = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, len(self.xs) - 2)
        x0 = self.xs[idx]
        h = self.xs[idx + 1] - x0
        t = (x - x0) / h
        t2 = t * t
        t3 = t2 * t
        h00 = 2 * t3 - 3 * t2 + 1
        h10 = t3 - 2 * t2 + t
        h01 = -2 * t3 + 3 * t2
        h11 = t3 - t2

        def hermite(v, dv):
            return (h00 * v[idx] + h10 * h * dv[idx]
                    + h01 * v[idx + 1] + h11 * h * dv[idx + 1])

        return hermite(self.As, self.dAs), hermite(self.Bs, self.dBs)


@dataclass(frozen=True)
class Curve:
    """A yield or forward curve sampled on a maturity grid (rates per annum)."""

    xs: np.ndarray
    values: np.ndarray
    kind: CurveKind

    def __post_init__(self):
        if len(self.xs) != len(self.values):
            raise ValueError("grid and values must have equal length")
        if np.any(np.diff(self.xs) <= 0):
            raise ValueError("maturity grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("curve values must be finite")
        if self.kind is CurveKind.YIELD and self.xs[0] <= 0:
            raise ValueError("yield curves are undefined at x = 0")


def solve_ab(m: AffineModel, x_max: float, tol: float = 1e-10) -> ABCurve:
    """Integrate the Riccati system from 0 to x_max.

    tol controls the local error of the adaptive RK4(5) stepper and must lie
    in (0, 1e-3]. Raises DomainEscapeError if B leaves the effective domain
    of F or R, NonFiniteError on overflow or integrator failure.
    """
    m.require_valid()
    if not (x_max > 0):
        raise ValueError(f"x_max must be positive, got {x_max}")
    if not (0 < tol <= 1e-3):
        raise ValueError(f"tol must lie in (0, 1e-3], got {tol}")

    edge = max(m.F_domain_lower, m.R_domain_lower)

    def rhs(x, y):
        b = y[1]
        if b < edge:
            raise DomainEscapeError(
                f"B({x:.6g}) = {b:.6g} left the effective domain (edge {edge:.6g})"
            )
        fb = m.F(b)
        rb = m.R(b)
        if not (np.isfinite(fb) and np.isfinite(rb)):
            raise NonFiniteError(f"F or R overflowed at B({x:.6g}) = {b:.6g}")
        return (fb, rb - 1.0)

    sol = solve_ivp(
        rhs,
        (0.0, x_max),
        (0.0, 0.0),
        method="RK45",
        rtol=tol,
        atol=tol * 1e-3,
        first_step=min(x_max * 1e-4, x_max),
    )
    if not sol.success:
        raise NonFiniteError(f"Riccati integration failed: {sol.message}")

    xs = sol.t
    As, Bs = sol.y
    # Monotone non-increase can be violated at rounding level once B
    # saturates near its limit; clamp those ties instead of failing.
    Bs = np.minimum.accumulate(Bs)
    dAs = np.asarray(m.F(Bs), dtype=float)
    dBs = np.asarray(m.R(Bs), dtype=float) - 1.0
    return ABCurve(xs=xs, As=As, Bs=Bs, dAs=dAs, dBs=dBs)


def closed_form_b(m: AffineModel, x) -> float | np.ndarray:
    """Closed-form B(x) for the built-in Vasicek and CIR models.

    Vasicek: B(x) = (exp(-lambda x) - 1) / lambda.
    CIR:     B(x) = -2 (e^{gamma x} - 1) / ((a+gamma)(e^{gamma x} - 1) + 2 gamma),
    evaluated in an overflow-safe rearrangement. Other kinds are rejected.
    """
    x = np.asarray(x, dtype=float)
    if m.kind == "vasicek":
        lam = m.params.lambda_
        out = np.expm1(-lam * x) / lam
    elif m.kind == "cir":
        a = m.params.a
        gam = m.params.gamma
        em = np.exp(-gam * x)
        out = -2.0 * (1.0 - em) / ((a + gam) * (1.0 - em) + 2.0 * gam * em)
    else:
        raise UnsupportedModelError(
            f"closed-form B available only for vasicek and cir, got {m.kind or m.name!r}"
        )
    return float(out) if out.ndim == 0 else out


def default_grid(x_max: float, n: int = DEFAULT_GRID_POINTS,
                 x_min: float = DEFAULT_X_MIN) -> np.ndarray:
    """Geometric maturity grid on [x_min, x_max] resolving both ends."""
    if not (0 < x_min < x_max):
        raise ValueError("need 0 < x_min < x_max")
    if n < 2:
        raise ValueError("grid needs at least 2 points")
    return np.geomspace(x_min, x_max, n)


def yield_curve(m: AffineModel, r: float, ab: ABCurve,
                xs: np.ndarray | None = None) -> Curve:
    """Yield curve Y(x, r) = -(A(x) + r B(x))/x on xs (default geometric grid)."""
    _check_rate(m, r)
    if xs is None:
        xs = default_grid(ab.x_max)
    xs = np.asarray(xs, dtype=float)
    if xs[0] <= 0:
        raise ValueError("yield grids must start at x > 0")
    A, B = ab.sample(xs)
    return Curve(xs=xs, values=-(A + r * B) / xs, kind=CurveKind.YIELD)


def forward_curve(m: AffineModel, r: float, ab: ABCurve,
                  xs: np.ndarray | None = None) -> Curve:
    """Forward curve f(x, r) = -F(B(x)) - r (R(B(x)) - 1); f(0, r) = r exactly."""
    _check_rate(m, r)
    if xs is None:
        xs = default_grid(ab.x_max)
    xs = np.asarray(xs, dtype=float)
    _, B = ab.sample(xs)
    values = -np.asarray(m.F(B), dtype=float) - r * (np.asarray(m.R(B), dtype=float) - 1.0)
    return Curve(xs=xs, values=values, kind=CurveKind.FORWARD)


def _check_rate(m: AffineModel, r: float) -> None:
    if not m.state_space.contains(r):
        raise OutOfStateSpaceError(
            f"short rate {r} outside state space {m.state_space.value}"
        )


def write_curve_csv(curve: Curve, target) -> None:
    """Write `x,value` rows with 17-significant-digit decimals.

    target may be a path or a writable text stream.
    """
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            _write_csv(curve, fh)
    else:
        _write_csv(curve, target)


def _write_csv(curve: Curve, fh: io.TextIOBase) -> None:
    fh.write("x,value\n")
    for x, v in zip(curve.xs, curve.values):
        fh.write(f"{x:.17g},{v:.17g}\n")
