"""Independent numerical shape detection and theorem-vs-numerics sweeps.

The oracle never consults the classification thresholds: it reads shapes
off densely sampled curves through the sign sequence of their slopes,

    (+)    -> normal,   (-) -> inverse,   (+,-) -> humped,

anything else -> indeterminate. Verification sweeps generate random
admissible models, classify a spread of short rates with both the
threshold rules and the oracle, and report every disagreement.

Slope values within `tol * max|slope|` of zero form a dead zone and are
ignored by the sign scan; rates too close to a threshold are skipped
entirely, since labels on the boundary are not numerically decidable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .classifier import ShapeClass, ShapeLabel, classify_forward, classify_yield
from .errors import DeadZoneError, ModelGenerationError
from .models import AffineModel, make_cir, make_gamma_ou, make_vasicek
from .models import CirParams, GammaOuParams, VasicekParams, StateSpace
from .riccati import Curve, CurveKind, default_grid, solve_ab
from .rng import derive_seed, make_rng
from .thresholds import Thresholds, compute_thresholds

__all__ = [
    "SignSequence",
    "VerificationRow",
    "VerificationReport",
    "sign_sequence",
    "classify_numeric",
    "random_model",
    "verify_model",
]

DEFAULT_DEAD_TOL = 1e-9
_MODEL_KINDS = ("vasicek", "cir", "gamma_ou")
_GENERATION_RETRIES = 100


@dataclass(frozen=True)
class SignSequence:
    """Run-compressed signs of a sampled function.

    crossings holds one interpolated abscissa per sign change; dead_zones
    lists the grid intervals whose samples fell below the dead threshold.
    """

    signs: tuple[str, ...]
    crossings: tuple[float, ...]
    dead_zones: tuple[tuple[float, float], ...]


def sign_sequence(xs, vs, tol: float = DEFAULT_DEAD_TOL) -> SignSequence:
    """Compress the signs of vs sampled on the strictly increasing grid xs.

    The dead zone is |v| < tol * max|v|. Raises DeadZoneError when every
    sample is dead (including identically zero input).
    """
    xs = np.asarray(xs, dtype=float)
    vs = np.asarray(vs, dtype=float)
    if len(xs) < 16:
        raise ValueError("sign scans need at least 16 samples")
    if len(xs) != len(vs):
        raise ValueError("grid and values must have equal length")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("grid must be strictly increasing")

    scale = float(np.max(np.abs(vs)))
    dead = np.abs(vs) < tol * scale if scale > 0 else np.ones(len(vs), dtype=bool)
    if dead.all():
        raise DeadZoneError("every sample lies inside the dead zone")

    signs: list[str] = []
    crossings: list[float] = []
    prev_idx: int | None = None
    for i in np.flatnonzero(~dead):
        s = "+" if vs[i] > 0 else "-"
        if not signs:
            signs.append(s)
        elif s != signs[-1]:
            xi, xj = xs[prev_idx], xs[i]
            vi, vj = vs[prev_idx], vs[i]
            crossings.append(float(xi + (xj - xi) * vi / (vi - vj)))
            signs.append(s)
        prev_idx = int(i)

    zones: list[tuple[float, float]] = []
    start = None
    for i, d in enumerate(dead):
        if d and start is None:
            start = i
        elif not d and start is not None:
            zones.append((float(xs[start]), float(xs[i - 1])))
            start = None
    if start is not None:
        zones.append((float(xs[start]), float(xs[-1])))

    return SignSequence(tuple(signs), tuple(crossings), tuple(zones))


def classify_numeric(curve: Curve, tol: float = DEFAULT_DEAD_TOL) -> ShapeClass:
    """Shape of a sampled curve from the sign sequence of its slopes.

    Slopes are centered differences of the curve values (one-sided at the
    ends). Reliable detection needs a dense grid (>= 400 points) reaching
    well past the hump scale, about 20 over the quasi-mean-reversion.
    """
    xs = curve.xs
    vs = curve.values
    slopes = np.empty_like(vs)
    slopes[1:-1] = (vs[2:] - vs[:-2]) / (xs[2:] - xs[:-2])
    slopes[0] = (vs[1] - vs[0]) / (xs[1] - xs[0])
    slopes[-1] = (vs[-1] - vs[-2]) / (xs[-1] - xs[-2])

    try:
        seq = sign_sequence(xs, slopes, tol)
    except DeadZoneError:
        return ShapeClass(ShapeLabel.INDETERMINATE)

    if seq.signs == ("+",):
        return ShapeClass(ShapeLabel.NORMAL)
    if seq.signs == ("-",):
        return ShapeClass(ShapeLabel.INVERSE)
    if seq.signs == ("+", "-"):
        return ShapeClass(ShapeLabel.HUMPED, hump_location=seq.crossings[0])
    return ShapeClass(ShapeLabel.INDETERMINATE)


def _loguniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def random_model(seed: int, kind: str | None = None) -> AffineModel:
    """Deterministic random admissible model.

    Parameters are log-uniform: mean-reversion/decay rate in [0.05, 5],
    long-run mean in [0.005, 0.15], volatility in [0.01, 0.5], jump shape
    in [0.1, 5], jump mean in [0.05, 2]. Draws failing validation are
    retried; exhaustion raises ModelGenerationError.
    """
    if kind is not None and kind not in _MODEL_KINDS:
        raise ValueError(f"kind must be one of {_MODEL_KINDS}, got {kind!r}")
    rng = make_rng(seed)
    for _ in range(_GENERATION_RETRIES):
        chosen = kind if kind is not None else _MODEL_KINDS[rng.integers(0, 3)]
        if chosen == "vasicek":
            m = make_vasicek(VasicekParams(
                lambda_=_loguniform(rng, 0.05, 5.0),
                theta=_loguniform(rng, 0.005, 0.15),
                sigma=_loguniform(rng, 0.01, 0.5),
            ))
        elif chosen == "cir":
            m = make_cir(CirParams(
                a=_loguniform(rng, 0.05, 5.0),
                theta=_loguniform(rng, 0.005, 0.15),
                sigma=_loguniform(rng, 0.01, 0.5),
            ))
        else:
            m = make_gamma_ou(GammaOuParams(
                lambda_=_loguniform(rng, 0.05, 5.0),
                k=_loguniform(rng, 0.1, 5.0),
                theta=_loguniform(rng, 0.05, 2.0),
            ))
        if m.validation_report().ok:
            return m
    raise ModelGenerationError(
        f"no admissible model after {_GENERATION_RETRIES} draws (seed {seed})"
    )


@dataclass(frozen=True)
class VerificationRow:
    r: float
    theorem_yield: ShapeLabel
    oracle_yield: ShapeLabel
    theorem_forward: ShapeLabel
    oracle_forward: ShapeLabel

    @property
    def agree(self) -> bool:
        return (self.theorem_yield == self.oracle_yield
                and self.theorem_forward == self.oracle_forward)

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "theorem_yield": self.theorem_yield.value,
            "oracle_yield": self.oracle_yield.value,
            "theorem_forward": self.theorem_forward.value,
            "oracle_forward": self.oracle_forward.value,
            "agree": self.agree,
        }


@dataclass(frozen=True)
class VerificationReport:
    model: dict
    thresholds: Thresholds
    rows: tuple[VerificationRow, ...]
    skipped: tuple[float, ...]

    @property
    def all_agree(self) -> bool:
        return all(row.agree for row in self.rows)

    def disagreements(self) -> list[VerificationRow]:
        return [row for row in self.rows if not row.agree]

    def json_lines(self) -> list[str]:
        """One JSON object per verified (model, r) row."""
        lines = []
        for row in self.rows:
            record = {"model": self.model, **row.as_dict()}
            lines.append(json.dumps(record))
        return lines


def _sample_regions(th: Thresholds, n_r: int, exclusion: float,
                    rng: np.random.Generator) -> list[float]:
    """Draw rates covering every classification region the state space allows.

    Each region is sampled away from its threshold endpoints by an interior
    margin, so humps stay resolvable on the default maturity grid.
    """
    fw, y, inv = th.b_fw_norm, th.b_y_norm, th.b_inv
    non_negative = th.state_space is StateSpace.NON_NEGATIVE
    band = (inv - fw) if math.isfinite(inv) else (th.b_asymp - fw)
    span = max(band, 0.02)

    def margin(threshold: float, width: float) -> float:
        return max(2 * exclusion * max(1.0, abs(threshold)), 0.002 * width)

    regions: list[tuple[float, float]] = []

    lo = 0.0 if non_negative else fw - span
    if lo < fw:
        width = fw - lo
        a = lo if non_negative else lo + margin(lo, width)
        b = fw - margin(fw, width)
        if a < b:
            regions.append((a, b))

    width = y - fw
    a, b = fw + margin(fw, width), y - margin(y, width)
    if a < b:
        regions.append((a, b))

    hi = inv if math.isfinite(inv) else y + span
    width = hi - y
    a = y + margin(y, width)
    b = hi - margin(inv, width) if math.isfinite(inv) else hi
    if a < b:
        regions.append((a, b))

    if math.isfinite(inv):
        a, b = inv + margin(inv, span), inv + span
        if a < b:
            regions.append((a, b))

    if not regions:
        return []
    draws = []
    for i in range(n_r):
        a, b = regions[i % len(regions)]
        draws.append(float(rng.uniform(a, b)))
    return draws


def verify_model(m: AffineModel, n_r: int = 40, exclusion: float = 1e-4,
                 seed: int = 0, grid_points: int = 500,
                 solver_tol: float = 1e-10) -> VerificationReport:
    """Compare threshold classification against the numerical oracle.

    Rates are drawn to cover all classification regions inside the state
    space; any rate within exclusion * max(1, |threshold|) of a threshold
    is skipped rather than judged. Curves are generated on a geometric grid
    out to max(30, 30/lambda) years.
    """
    if n_r < 1:
        raise ValueError("n_r must be at least 1")
    if exclusion < 0:
        raise ValueError("exclusion must be non-negative")

    th = compute_thresholds(m)
    x_max = max(30.0, 30.0 / th.lambda_qmr)
    ab = solve_ab(m, x_max, tol=solver_tol)
    xs = default_grid(x_max, grid_points)
    A, B = ab.sample(xs)
    FB = np.asarray(m.F(B), dtype=float)
    RB = np.asarray(m.R(B), dtype=float)

    named = [th.b_fw_norm, th.b_y_norm, th.b_asymp]
    if math.isfinite(th.b_inv):
        named.append(th.b_inv)

    rng = make_rng(seed)
    rows: list[VerificationRow] = []
    skipped: list[float] = []
    for r in _sample_regions(th, n_r, exclusion, rng):
        if any(abs(r - t) < exclusion * max(1.0, abs(t)) for t in named):
            skipped.append(r)
            continue
        y_curve = Curve(xs=xs, values=-(A + r * B) / xs, kind=CurveKind.YIELD)
        f_curve = Curve(xs=xs, values=-FB - r * (RB - 1.0), kind=CurveKind.FORWARD)
        rows.append(VerificationRow(
            r=r,
            theorem_yield=classify_yield(th, r).label,
            oracle_yield=classify_numeric(y_curve).label,
            theorem_forward=classify_forward(th, r).label,
            oracle_forward=classify_numeric(f_curve).label,
        ))
    return VerificationReport(
        model=m.describe(),
        thresholds=th,
        rows=tuple(rows),
        skipped=tuple(skipped),
    )
