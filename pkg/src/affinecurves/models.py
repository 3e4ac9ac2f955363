"""Affine one-factor short-rate models defined by their driving functions.

A model is a pair of scalar functions (F, R) entering the exponential-affine
bond price P(t, t+x) = exp(A(x) + r_t B(x)), where A and B solve

    A'(x) = F(B(x)),      A(0) = 0,
    B'(x) = R(B(x)) - 1,  B(0) = 0.

Built-in parameterizations (rates per annum, maturities in years):

    Vasicek     F(u) = lam*theta*u + (sigma^2/2) u^2      R(u) = -lam*u
    CIR         F(u) = a*theta*u                          R(u) = (sigma^2/2) u^2 - a*u
    gamma-OU    F(u) = lam*theta*k*u / (1 - theta*u)      R(u) = -lam*u

All built-ins satisfy F(0) = R(0) = 0, convexity of F and R, and carry exact
derivative evaluators. Custom models enter through the same evaluator
interface (value + derivative, linearity flags, effective-domain edges) and
are gated by `validate` before any downstream use.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ModelSpecError, ModelValidationError

__all__ = [
    "StateSpace",
    "VasicekParams",
    "CirParams",
    "GammaOuParams",
    "AffineModel",
    "ValidationCheck",
    "ValidationReport",
    "make_vasicek",
    "make_cir",
    "make_gamma_ou",
    "make_custom_model",
    "validate",
    "model_from_spec",
    "load_model_file",
]

# How far left of the origin structural checks probe when no natural scale
# (domain edge or linear-R root) caps the interval.
_PROBE_SPAN = 64.0


class StateSpace(enum.Enum):
    """Admissible values of the short rate."""

    NON_NEGATIVE = "non_negative_reals"
    REALS = "all_reals"

    def contains(self, r: float) -> bool:
        if not math.isfinite(r):
            return False
        if self is StateSpace.NON_NEGATIVE:
            return r >= 0.0
        return True


@dataclass(frozen=True)
class VasicekParams:
    """Mean-reversion speed (1/years), long-run mean and volatility (rate units)."""

    lambda_: float
    theta: float
    sigma: float

    def __post_init__(self):
        if not (self.lambda_ > 0):
            raise ValueError(f"lambda must be positive, got {self.lambda_}")
        if not (self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta}")


@dataclass(frozen=True)
class CirParams:
    """Square-root diffusion parameters; all strictly positive."""

    a: float
    theta: float
    sigma: float

    def __post_init__(self):
        for name in ("a", "theta", "sigma"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive, got {v}")

    @property
    def gamma(self) -> float:
        """sqrt(2 sigma^2 + a^2); satisfies gamma > a."""
        return math.sqrt(2.0 * self.sigma**2 + self.a**2)


@dataclass(frozen=True)
class GammaOuParams:
    """OU process driven by compound Poisson jumps: decay rate lambda,
    jump intensity lambda*k, exponential jump sizes with mean theta."""

    lambda_: float
    k: float
    theta: float

    def __post_init__(self):
        for name in ("lambda_", "k", "theta"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the structural checks run by `validate`."""

    model_name: str
    checks: tuple[ValidationCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[ValidationCheck]:
        return [c for c in self.checks if not c.passed]

    def __str__(self) -> str:
        lines = [f"validation of {self.model_name!r}:"]
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            detail = f" ({c.detail})" if c.detail else ""
            lines.append(f"  [{status}] {c.name}{detail}")
        return "\n".join(lines)


@dataclass(frozen=True)
class AffineModel:
    """An affine short-rate model as seen by the pricing and shape machinery.

    F, R and their derivatives dF, dR accept scalars or numpy arrays and
    evaluate on u <= 0 (the range the Riccati solution B visits). Evaluation
    below a finite effective-domain edge is undefined; callers guard it.
    Instances are immutable and safe for concurrent reads.
    """

    name: str
    F: Callable
    dF: Callable
    R: Callable
    dR: Callable
    F_is_linear: bool
    R_is_linear: bool
    state_space: StateSpace
    F_domain_lower: float = -math.inf
    R_domain_lower: float = -math.inf
    kind: str | None = None  # "vasicek" | "cir" | "gamma_ou" for built-ins
    params: object | None = None
    _report: ValidationReport | None = field(
        default=None, init=False, repr=False, compare=False
    )

    @property
    def is_builtin(self) -> bool:
        return self.kind in ("vasicek", "cir", "gamma_ou")

    def validation_report(self) -> ValidationReport:
        """Run (and cache) the structural checks for this model."""
        if self._report is None:
            object.__setattr__(self, "_report", validate(self))
        return self._report

    def require_valid(self) -> None:
        """Raise ModelValidationError unless all structural checks pass."""
        report = self.validation_report()
        if not report.ok:
            failed = ", ".join(c.name for c in report.failures())
            raise ModelValidationError(
                f"model {self.name!r} failed validation: {failed}"
            )

    def describe(self) -> dict:
        """JSON-ready descriptor of the model's kind and parameters."""
        if self.kind == "vasicek":
            p = self.params
            return {"kind": "vasicek",
                    "params": {"lambda": p.lambda_, "theta": p.theta, "sigma": p.sigma}}
        if self.kind == "cir":
            p = self.params
            return {"kind": "cir",
                    "params": {"a": p.a, "theta": p.theta, "sigma": p.sigma}}
        if self.kind == "gamma_ou":
            p = self.params
            return {"kind": "gamma_ou",
                    "params": {"lambda": p.lambda_, "k": p.k, "theta": p.theta}}
        return {"kind": "custom", "name": self.name}


def make_vasicek(p: VasicekParams) -> AffineModel:
    """Vasicek model: Gaussian OU short rate, state space all of R."""
    lam, theta, sigma = p.lambda_, p.theta, p.sigma
    half_s2 = 0.5 * sigma**2
    return AffineModel(
        name=f"vasicek(lambda={lam:g}, theta={theta:g}, sigma={sigma:g})",
        F=lambda u: lam * theta * u + half_s2 * u * u,
        dF=lambda u: lam * theta + sigma**2 * u,
        R=lambda u: -lam * u,
        dR=lambda u: -lam + 0.0 * u,
        F_is_linear=False,
        R_is_linear=True,
        state_space=StateSpace.REALS,
        kind="vasicek",
        params=p,
    )


def make_cir(p: CirParams) -> AffineModel:
    """Cox-Ingersoll-Ross model: square-root diffusion on non-negative rates."""
    a, theta, sigma = p.a, p.theta, p.sigma
    half_s2 = 0.5 * sigma**2
    return AffineModel(
        name=f"cir(a={a:g}, theta={theta:g}, sigma={sigma:g})",
        F=lambda u: a * theta * u,
        dF=lambda u: a * theta + 0.0 * u,
        R=lambda u: half_s2 * u * u - a * u,
        dR=lambda u: sigma**2 * u - a,
        F_is_linear=True,
        R_is_linear=False,
        state_space=StateSpace.NON_NEGATIVE,
        kind="cir",
        params=p,
    )


def make_gamma_ou(p: GammaOuParams) -> AffineModel:
    """Jump-OU model with compound Poisson driver; F has a pole at 1/theta > 0,
    which evaluation on u <= 0 never approaches."""
    lam, k, theta = p.lambda_, p.k, p.theta
    return AffineModel(
        name=f"gamma_ou(lambda={lam:g}, k={k:g}, theta={theta:g})",
        F=lambda u: lam * theta * k * u / (1.0 - theta * u),
        dF=lambda u: lam * theta * k / (1.0 - theta * u) ** 2,
        R=lambda u: -lam * u,
        dR=lambda u: -lam + 0.0 * u,
        F_is_linear=False,
        R_is_linear=True,
        state_space=StateSpace.NON_NEGATIVE,
        kind="gamma_ou",
        params=p,
    )


def _elementwise(fn: Callable) -> Callable:
    """Wrap a scalar-only evaluator so it also accepts numpy arrays."""
    vec = np.vectorize(fn, otypes=[float])

    def wrapped(u):
        if np.ndim(u) == 0:
            return float(fn(float(u)))
        return vec(u)

    return wrapped


def make_custom_model(
    name: str,
    F: Callable,
    dF: Callable,
    R: Callable,
    dR: Callable,
    *,
    F_is_linear: bool,
    R_is_linear: bool,
    state_space: StateSpace,
    F_domain_lower: float = -math.inf,
    R_domain_lower: float = -math.inf,
    vectorized: bool = False,
) -> AffineModel:
    """Build a user-defined model from evaluator pairs.

    Set `vectorized` if the callables already accept numpy arrays; otherwise
    they are wrapped elementwise. The returned model still has to pass
    `validate` before the pricing and shape operations accept it.
    """
    if not vectorized:
        F, dF, R, dR = map(_elementwise, (F, dF, R, dR))
    return AffineModel(
        name=name,
        F=F,
        dF=dF,
        R=R,
        dR=dR,
        F_is_linear=F_is_linear,
        R_is_linear=R_is_linear,
        state_space=state_space,
        F_domain_lower=F_domain_lower,
        R_domain_lower=R_domain_lower,
        kind=None,
        params=None,
    )


def _probe_low_edge(m: AffineModel) -> float:
    """Left end of the interval on which structural checks sample F and R."""
    lo = -_PROBE_SPAN
    for edge in (m.F_domain_lower, m.R_domain_lower):
        if math.isfinite(edge):
            lo = max(lo, edge + 1e-9 * max(1.0, abs(edge)))
    if m.state_space is StateSpace.REALS and m.R_is_linear:
        beta = float(m.dR(0.0))
        if beta < 0:
            lo = max(lo, (1.0 / beta) * (1.0 - 1e-9))
    return lo


def _finite_deviations(f: Callable, us: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values of f on us and the chord-minus-midpoint convexity deviations."""
    vals = np.asarray(f(us), dtype=float)
    u1, u2, u3 = us[:-2], us[1:-1], us[2:]
    v1, v2, v3 = vals[:-2], vals[1:-1], vals[2:]
    chord = ((u3 - u2) * v1 + (u2 - u1) * v3) / (u3 - u1)
    return vals, chord - v2


def validate(m: AffineModel, n_points: int = 61) -> ValidationReport:
    """Check the structural assumptions a model must satisfy.

    Covers: F(0) = R(0) = 0; sampled convexity of F and R; derivative
    consistency against centered differences; at least one of F, R non-linear
    with F not identically zero; state-space/linearity consistency; and, for
    models on all of R, finiteness of F left of the origin down to the root
    of R(u) = 1.
    """
    checks: list[ValidationCheck] = []

    def add(name: str, passed: bool, detail: str = ""):
        checks.append(ValidationCheck(name, bool(passed), detail))

    f0 = float(m.F(0.0))
    r0 = float(m.R(0.0))
    add("F(0) = 0", abs(f0) <= 1e-12, f"F(0) = {f0:.3e}")
    add("R(0) = 0", abs(r0) <= 1e-12, f"R(0) = {r0:.3e}")

    lo = _probe_low_edge(m)
    us = np.linspace(lo, 0.0, n_points)

    f_vals, f_dev = _finite_deviations(m.F, us)
    r_vals, r_dev = _finite_deviations(m.R, us)
    finite = np.all(np.isfinite(f_vals)) and np.all(np.isfinite(r_vals))
    add("F, R finite on probe interval", finite,
        f"probe [{lo:.6g}, 0]")

    if finite:
        f_scale = max(1.0, float(np.max(np.abs(f_vals))))
        r_scale = max(1.0, float(np.max(np.abs(r_vals))))
        slack_f = 1e-12 * f_scale
        slack_r = 1e-12 * r_scale
        add("F convex on probe interval", bool(np.all(f_dev >= -slack_f)),
            f"worst deviation {float(np.min(f_dev)):.3e}")
        add("R convex on probe interval", bool(np.all(r_dev >= -slack_r)),
            f"worst deviation {float(np.min(r_dev)):.3e}")

        # Declared linearity must match the sampled geometry.
        f_curved = float(np.max(f_dev)) > 10 * slack_f
        r_curved = float(np.max(r_dev)) > 10 * slack_r
        add("F linearity flag consistent", m.F_is_linear != f_curved or not finite,
            f"flag={m.F_is_linear}, sampled curvature {float(np.max(f_dev)):.3e}")
        add("R linearity flag consistent", m.R_is_linear != r_curved,
            f"flag={m.R_is_linear}, sampled curvature {float(np.max(r_dev)):.3e}")

        add("F not identically zero",
            float(np.max(np.abs(f_vals))) > 1e-14,
            "max |F| on probe")

        interior = us[1:-1]
        h = 1e-6 * np.maximum(1.0, np.abs(interior))
        ok_f, worst_f = _derivative_consistency(m.F, m.dF, interior, h)
        ok_r, worst_r = _derivative_consistency(m.R, m.dR, interior, h)
        add("dF matches centered differences", ok_f, f"worst rel err {worst_f:.3e}")
        add("dR matches centered differences", ok_r, f"worst rel err {worst_r:.3e}")
    else:
        add("F convex on probe interval", False, "non-finite samples")
        add("R convex on probe interval", False, "non-finite samples")

    add("not both F and R linear", not (m.F_is_linear and m.R_is_linear))

    if m.state_space is StateSpace.REALS:
        beta = float(m.dR(0.0))
        linear_ok = m.R_is_linear and beta < 0
        add("state space R requires linear R with negative slope", linear_ok,
            f"R_is_linear={m.R_is_linear}, R'(0)={beta:.6g}")
        if linear_ok:
            c = 1.0 / beta
            probe = np.linspace(c * (1.0 - 1e-9), 0.0, 41)
            vals = np.asarray(m.F(probe), dtype=float)
            add("F finite on (c, 0]", bool(np.all(np.isfinite(vals))),
                f"c = {c:.6g}")
    return ValidationReport(model_name=m.name, checks=tuple(checks))


def _derivative_consistency(f, df, us, h) -> tuple[bool, float]:
    """Compare df against centered differences of f; scale-aware tolerance."""
    exact = np.asarray(df(us), dtype=float) + 0.0 * us
    fd = (np.asarray(f(us + h), dtype=float) - np.asarray(f(us - h), dtype=float)) / (2 * h)
    scale = max(float(np.max(np.abs(exact))), 1e-12)
    denom = np.maximum(np.abs(exact), 1e-3 * scale)
    rel = np.abs(exact - fd) / denom
    worst = float(np.max(rel))
    return worst <= 1e-5, worst


# ---------------------------------------------------------------------------
# Model specification files
# ---------------------------------------------------------------------------

_SPEC_PARAM_KEYS = {
    "vasicek": ("lambda", "theta", "sigma"),
    "cir": ("a", "theta", "sigma"),
    "gamma_ou": ("lambda", "k", "theta"),
}


def model_from_spec(spec: dict) -> AffineModel:
    """Build a built-in model from a {"kind": ..., "params": {...}} mapping.

    Unknown keys, missing parameters, and non-numeric values are errors.
    """
    if not isinstance(spec, dict):
        raise ModelSpecError("model spec must be a JSON object")
    extra = set(spec) - {"kind", "params"}
    if extra:
        raise ModelSpecError(f"unknown top-level keys in model spec: {sorted(extra)}")
    kind = spec.get("kind")
    if kind not in _SPEC_PARAM_KEYS:
        raise ModelSpecError(
            f"kind must be one of {sorted(_SPEC_PARAM_KEYS)}, got {kind!r}"
        )
    params = spec.get("params")
    if not isinstance(params, dict):
        raise ModelSpecError("params must be a JSON object")
    expected = _SPEC_PARAM_KEYS[kind]
    missing = [k for k in expected if k not in params]
    unknown = [k for k in params if k not in expected]
    if missing:
        raise ModelSpecError(f"missing parameters for {kind}: {missing}")
    if unknown:
        raise ModelSpecError(f"unknown parameters for {kind}: {unknown}")
    values = {}
    for key in expected:
        v = params[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ModelSpecError(f"parameter {key!r} must be a number, got {v!r}")
        values[key] = float(v)
    try:
        if kind == "vasicek":
            return make_vasicek(VasicekParams(values["lambda"], values["theta"], values["sigma"]))
        if kind == "cir":
            return make_cir(CirParams(values["a"], values["theta"], values["sigma"]))
        return make_gamma_ou(GammaOuParams(values["lambda"], values["k"], values["theta"]))
    except ValueError as exc:
        raise ModelSpecError(str(exc)) from exc


def load_model_file(path: str | Path) -> AffineModel:
    """Read a model specification JSON file."""
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelSpecError(f"invalid JSON in {path}: {exc}") from exc
    return model_from_spec(spec)
