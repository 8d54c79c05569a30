"""Singular Björling data and the two surface integral representations.

The data is a pair {gamma, L}: a null curve and a null vector field
along it with <gamma', L> = 0.  Both a space-like surface (evaluated by
analytic continuation of gamma and the antiderivative of L to complex
arguments) and a time-like surface (evaluated along real characteristic
lines) contain gamma at v = 0 with transverse derivative L.

Path integrals are always evaluated as antiderivative differences, which
is exact within the series truncation; no quadrature is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import dsl
from .curves import Curve3, PathIntegral
from .lorentz import LorentzVec
from .series import DEFAULT_ORDER

__all__ = [
    "MaxDomain",
    "MinDiamond",
    "OutOfDomain",
    "RealityCheckFailed",
    "EvaluationError",
    "BjorlingData",
    "ValidationCheck",
    "ValidationReport",
    "validate",
    "maxface_eval",
    "minface_eval",
    "null_decompose",
    "MaxfaceEvaluator",
    "MinfaceEvaluator",
    "load_curve_text",
]

REALITY_TOL = 1e-10


class OutOfDomain(Exception):
    pass


class RealityCheckFailed(Exception):
    """Residual imaginary part above tolerance: the series order is too low."""


class EvaluationError(Exception):
    pass


# ----------------------------------------------------------------------
# parameter domains


@dataclass(frozen=True)
class MaxDomain:
    """Open rectangle (u_min, u_max) x (v_min, v_max) for the space-like surface."""

    u_min: float
    u_max: float
    v_min: float
    v_max: float

    def contains(self, u, v):
        return (
            (self.u_min < np.asarray(u))
            & (np.asarray(u) < self.u_max)
            & (self.v_min < np.asarray(v))
            & (np.asarray(v) < self.v_max)
        )

    def bbox(self):
        return (self.u_min, self.u_max, self.v_min, self.v_max)

    def corners(self):
        return [
            (self.u_min, self.v_min),
            (self.u_min, self.v_max),
            (self.u_max, self.v_min),
            (self.u_max, self.v_max),
        ]


@dataclass(frozen=True)
class MinDiamond:
    """The set {(u,v): a < u+v < b and a < u-v < b}, optionally clipped in v."""

    a: float
    b: float
    v_clip: float | None = None

    def contains(self, u, v):
        u = np.asarray(u)
        v = np.asarray(v)
        ok = (self.a < u + v) & (u + v < self.b) & (self.a < u - v) & (u - v < self.b)
        if self.v_clip is not None:
            ok = ok & (np.abs(v) < self.v_clip)
        return ok

    def bbox(self):
        half = 0.5 * (self.b - self.a)
        vmax = half if self.v_clip is None else min(half, self.v_clip)
        return (self.a, self.b, -vmax, vmax)


# ----------------------------------------------------------------------
# data


class BjorlingData:
    """Validated-on-demand pair {gamma, L} over an interval (a, b)."""

    def __init__(self, gamma: Curve3, L: Curve3, interval, order: int = DEFAULT_ORDER):
        a, b = float(interval[0]), float(interval[1])
        if not a < b:
            raise ValueError(f"interval must satisfy a < b, got ({a}, {b})")
        self.gamma = gamma
        self.L = L
        self.interval = (a, b)
        self.order = order
        self._gamma_prime: Curve3 | None = None
        self._L_prime: Curve3 | None = None
        self._lam: PathIntegral | None = None
        self._max_eval: MaxfaceEvaluator | None = None
        self._min_eval: MinfaceEvaluator | None = None
        self._scales: dict | None = None

    # -- derived curves, built lazily and shared

    @property
    def gamma_prime(self) -> Curve3:
        if self._gamma_prime is None:
            self._gamma_prime = self.gamma.derivative()
        return self._gamma_prime

    @property
    def L_prime(self) -> Curve3:
        if self._L_prime is None:
            self._L_prime = self.L.derivative()
        return self._L_prime

    @property
    def lam(self) -> PathIntegral:
        """Componentwise antiderivative of L (anchor point is immaterial:
        both surface formulas only ever use antiderivative differences)."""
        if self._lam is None:
            self._lam = PathIntegral(self.L)
        return self._lam

    def maxface(self) -> "MaxfaceEvaluator":
        if self._max_eval is None:
            self._max_eval = MaxfaceEvaluator(self)
        return self._max_eval

    def minface(self) -> "MinfaceEvaluator":
        if self._min_eval is None:
            self._min_eval = MinfaceEvaluator(self)
        return self._min_eval

    def diamond(self, v_clip: float | None = None) -> MinDiamond:
        a, b = self.interval
        return MinDiamond(a, b, v_clip)

    def scales(self, samples: int = 1024) -> dict:
        """Sampled sup magnitudes used to make zero tests scale-aware."""
        if self._scales is None:
            a, b = self.interval
            ts = np.linspace(a, b, samples)
            gp = self.gamma_prime.eval_many(ts)
            gpp = self.gamma_prime.derivative().eval_many(ts)
            lv = self.L.eval_many(ts)
            lp = self.L_prime.eval_many(ts)
            d23 = gp[:, 1] * gpp[:, 2] - gp[:, 2] * gpp[:, 1]
            d12 = gp[:, 0] * gpp[:, 1] - gpp[:, 0] * gp[:, 1]
            d23_l = lv[:, 1] * lp[:, 2] - lv[:, 2] * lp[:, 1]
            d12_l = lv[:, 0] * lp[:, 1] - lp[:, 0] * lv[:, 1]
            self._scales = {
                "gamma_prime": float(np.max(np.abs(gp))),
                "gamma_2nd": float(np.max(np.abs(gpp))),
                "L": float(np.max(np.abs(lv))),
                "L_prime": float(np.max(np.abs(lp))),
                "D23_gamma": float(np.max(np.abs(d23))),
                "D12_gamma": float(np.max(np.abs(d12))),
                "D23_L": float(np.max(np.abs(d23_l))),
                "D12_L": float(np.max(np.abs(d12_l))),
            }
        return self._scales


def load_curve_text(text: str, order: int = DEFAULT_ORDER) -> BjorlingData:
    """Build BjorlingData from curve definition file contents."""
    spec = dsl.parse_curve_file(text)
    gamma = Curve3.from_exprs(spec.gamma, spec.interval, order)
    if spec.l_field is None:
        L = Curve3.zero(spec.interval, order)
    else:
        L = Curve3.from_exprs(spec.l_field, spec.interval, order)
    return BjorlingData(gamma, L, spec.interval, order)


# ----------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    worst: float
    at: float
    note: str = ""


@dataclass
class ValidationReport:
    checks: list[ValidationCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[ValidationCheck]:
        return [c for c in self.checks if not c.passed]

    def as_text(self) -> str:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"{status}  {c.name}: worst {c.worst:.3e} at t={c.at:.6g}  {c.note}")
        verdict = "admissible" if self.ok else "NOT admissible"
        lines.append(f"data is {verdict}")
        return "\n".join(lines)


def validate(data: BjorlingData, samples: int = 200, tol: float = 1e-8,
             seed: int | None = None) -> ValidationReport:
    """Check the admissibility conditions at sampled points of the interval.

    The report is pure data: failed conditions never raise.  Identity
    conditions (null-ness, orthogonality) report the worst relative
    violation; inequation conditions report the smallest margin observed
    where the condition applies.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    a, b = data.interval
    if seed is None:
        ts = np.linspace(a, b, samples)
    else:
        rng = np.random.default_rng(seed)
        ts = np.sort(rng.uniform(a, b, samples))
    try:
        gp = data.gamma_prime.eval_many(ts)
        lv = data.L.eval_many(ts)
    except Exception as exc:  # trust-radius or lowering failures
        raise EvaluationError(f"could not sample the data curves: {exc}") from exc

    report = ValidationReport()

    def lorentz_sq(v):
        return v[:, 0] ** 2 + v[:, 1] ** 2 - v[:, 2] ** 2

    def euclid_sq(v):
        return np.sum(v * v, axis=1)

    def add_identity(name, values, scale, note=""):
        rel = np.abs(values) / np.maximum(1.0, scale)
        i = int(np.argmax(rel))
        report.checks.append(
            ValidationCheck(name, bool(rel[i] <= tol), float(rel[i]), float(ts[i]), note)
        )

    add_identity("gamma_prime_null", lorentz_sq(gp), euclid_sq(gp),
                 "<gamma', gamma'> = 0 along the curve")
    if data.L.is_zero:
        report.checks.append(ValidationCheck(
            "L_null", True, 0.0, a, "L is exactly zero"))
        report.checks.append(ValidationCheck(
            "orthogonality", True, 0.0, a, "L is exactly zero"))
    else:
        add_identity("L_null", lorentz_sq(lv), euclid_sq(lv), "<L, L> = 0")
        add_identity(
            "orthogonality",
            gp[:, 0] * lv[:, 0] + gp[:, 1] * lv[:, 1] - gp[:, 2] * lv[:, 2],
            np.sqrt(euclid_sq(gp) * euclid_sq(lv)),
            "<gamma', L> = 0",
        )

    gp_mag = np.max(np.abs(gp), axis=1)
    lv_mag = np.max(np.abs(lv), axis=1)
    both_sup = float(np.max(gp_mag + lv_mag))
    report.checks.append(ValidationCheck(
        "not_both_identically_zero", both_sup > tol, both_sup, a,
        "gamma' and L may not both vanish identically"))

    # inequation conditions: the components of a null tangent/field must not
    # be characteristic (second component equal to plus/minus the third)
    def add_margin(name, margins, applies, note=""):
        if not np.any(applies):
            report.checks.append(ValidationCheck(name, True, math.inf, a,
                                                 note + " (condition vacuous)"))
            return
        m = np.where(applies, margins, np.inf)
        i = int(np.argmin(m))
        report.checks.append(
            ValidationCheck(name, bool(m[i] > tol), float(m[i]), float(ts[i]), note)
        )

    gp_scale = np.maximum(1.0, np.sqrt(euclid_sq(gp)))
    add_margin(
        "gamma23_noncharacteristic",
        np.minimum(np.abs(gp[:, 1] - gp[:, 2]), np.abs(gp[:, 1] + gp[:, 2])) / gp_scale,
        gp_mag > tol * np.max(gp_mag) if np.max(gp_mag) > 0 else gp_mag > 0,
        "gamma_2' != +-gamma_3' where gamma' != 0",
    )
    if data.L.is_zero:
        report.checks.append(ValidationCheck(
            "L23_noncharacteristic", True, math.inf, a, "L is exactly zero (vacuous)"))
    else:
        lv_scale = np.maximum(1.0, np.sqrt(euclid_sq(lv)))
        add_margin(
            "L23_noncharacteristic",
            np.minimum(np.abs(lv[:, 1] - lv[:, 2]), np.abs(lv[:, 1] + lv[:, 2])) / lv_scale,
            lv_mag > tol * np.max(lv_mag) if np.max(lv_mag) > 0 else lv_mag > 0,
            "L_2 != +-L_3 where L != 0",
        )

    # time-like representation needs gamma' distinct from both +L and -L
    if data.L.is_zero:
        distinct = both_sup > tol
        note = "gamma' !=- +-L reduces to gamma' != 0 when L = 0"
        worst = both_sup
        at = a
    else:
        scale = np.maximum(1.0, np.sqrt(np.maximum(euclid_sq(gp), euclid_sq(lv))))
        plus = np.max(np.max(np.abs(gp - lv), axis=1) / scale)
        minus = np.max(np.max(np.abs(gp + lv), axis=1) / scale)
        worst = float(min(plus, minus))
        distinct = worst > tol
        note = "gamma' is not identically +L or -L"
        at = a
    report.checks.append(ValidationCheck(
        "minface_gamma_prime_not_pm_L", bool(distinct), worst, at, note))

    # space-like representation needs a non-constant (or non-unimodular)
    # Gauss map: a unimodular constant g makes the representation degenerate
    from .weierstrass import UndefinedGauss, max_gauss_from_bjorling

    try:
        wd = max_gauss_from_bjorling(data)
        gs = wd.g_many(ts)
        mean = np.mean(gs)
        spread = float(np.max(np.abs(gs - mean)))
        constant = spread <= tol * (1.0 + abs(mean))
        unimodular = abs(abs(mean) - 1.0) <= tol
        bad = constant and unimodular
        report.checks.append(ValidationCheck(
            "maxface_gauss_nonunimodular", not bad,
            spread if constant else spread, float(ts[0]),
            "|g| must not be identically 1 (g constant of modulus 1)"))
    except UndefinedGauss as exc:
        report.checks.append(ValidationCheck(
            "maxface_gauss_nonunimodular", False, 0.0, a, f"Gauss map undefined: {exc}"))

    return report


# ----------------------------------------------------------------------
# surface evaluators


class MaxfaceEvaluator:
    """Space-like surface X(u,v) built from the data by analytic continuation.

    X = (gamma(u+iv) + gamma(u-iv))/2 - (i/2) (Lam(u+iv) - Lam(u-iv)) with
    Lam the antiderivative of L.  The imaginary parts cancel by Schwarz
    symmetry; the residual is measured and must stay below tolerance.
    """

    def __init__(self, data: BjorlingData):
        self.data = data

    def grid(self, us, vs) -> np.ndarray:
        """Evaluate on the lattice us x vs; returns shape (len(us), len(vs), 3)."""
        us = np.atleast_1d(np.asarray(us, dtype=float))
        vs = np.atleast_1d(np.asarray(vs, dtype=float))
        z = us[:, None] + 1j * vs[None, :]
        return self.at_complex(z)

    def at_complex(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        g_plus = self.data.gamma.eval_complex(z)
        g_minus = self.data.gamma.eval_complex(np.conj(z))
        if self.data.L.is_zero:
            x = 0.5 * (g_plus + g_minus)
        else:
            lam_plus = self.data.lam.eval_complex(z)
            lam_minus = self.data.lam.eval_complex(np.conj(z))
            x = 0.5 * (g_plus + g_minus) - 0.5j * (lam_plus - lam_minus)
        resid = float(np.max(np.abs(x.imag))) if x.size else 0.0
        scale = 1.0 + (float(np.max(np.abs(x.real))) if x.size else 0.0)
        if resid > REALITY_TOL * scale:
            raise RealityCheckFailed(
                f"imaginary residual {resid:.3e} exceeds tolerance; "
                "increase the series order")
        return x.real

    def at(self, u: float, v: float) -> LorentzVec:
        return LorentzVec.from_array(self.at_complex(np.array(complex(u, v))))


class MinfaceEvaluator:
    """Time-like surface X(u,v) = (gamma(u+v)+gamma(u-v))/2 + (Lam(u+v)-Lam(u-v))/2.

    Defined on the diamond a < u+-v < b; points outside raise OutOfDomain
    (grid evaluation masks them with NaN instead).
    """

    def __init__(self, data: BjorlingData):
        self.data = data

    def grid(self, us, vs, region: MinDiamond | None = None) -> np.ndarray:
        us = np.atleast_1d(np.asarray(us, dtype=float))
        vs = np.atleast_1d(np.asarray(vs, dtype=float))
        region = region or self.data.diamond()
        uu, vv = np.meshgrid(us, vs, indexing="ij")
        mask = region.contains(uu, vv)
        out = np.full(uu.shape + (3,), np.nan)
        if np.any(mask):
            out[mask] = self._values(uu[mask], vv[mask])
        return out

    def _values(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        s = u + v
        t = u - v
        g = 0.5 * (self.data.gamma.eval_many(s) + self.data.gamma.eval_many(t))
        if self.data.L.is_zero:
            return g
        lam = 0.5 * (self.data.lam.eval_many(s) - self.data.lam.eval_many(t))
        return g + lam

    def at(self, u: float, v: float) -> LorentzVec:
        a, b = self.data.interval
        if not (a < u + v < b and a < u - v < b):
            raise OutOfDomain(
                f"({u:g}, {v:g}) is outside the diamond over ({a:g}, {b:g})")
        return LorentzVec.from_array(
            self._values(np.array([u]), np.array([v]))[0])


def maxface_eval(data: BjorlingData, u: float, v: float) -> LorentzVec:
    """Point evaluation of the space-like surface; X(u, 0) = gamma(u)."""
    return data.maxface().at(u, v)


def minface_eval(data: BjorlingData, u: float, v: float) -> LorentzVec:
    """Point evaluation of the time-like surface; X(u, 0) = gamma(u)."""
    return data.minface().at(u, v)


def null_decompose(data: BjorlingData, x0: float | None = None) -> tuple[Curve3, Curve3]:
    """Split the time-like surface into null curves alpha(u-v) + beta(u+v).

    alpha(t) = (gamma(t) + int_t^x0 L)/2 and beta(s) = (gamma(s) + int_x0^s L)/2,
    so alpha' = (gamma' - L)/2 and beta' = (gamma' + L)/2 are both null.
    """
    a, b = data.interval
    x0 = 0.5 * (a + b) if x0 is None else float(x0)
    if not a <= x0 <= b:
        raise ValueError(f"x0={x0:g} outside the data interval ({a:g}, {b:g})")
    lam = data.lam
    v0 = lam.eval(x0)

    def expand_alpha(center, n):
        g = data.gamma.at(center, n)
        lam_loc = lam.at(center, n)
        comps = [
            (gs - ls + float(v)) * 0.5
            for gs, ls, v in zip(g.components, lam_loc, v0)
        ]
        from .series import AnalyticCurve3

        return AnalyticCurve3(*comps)

    def expand_beta(center, n):
        g = data.gamma.at(center, n)
        lam_loc = lam.at(center, n)
        comps = [
            (gs + ls - float(v)) * 0.5
            for gs, ls, v in zip(g.components, lam_loc, v0)
        ]
        from .series import AnalyticCurve3

        return AnalyticCurve3(*comps)

    alpha = Curve3(expand_alpha, data.interval, data.order)
    beta = Curve3(expand_beta, data.interval, data.order)
    return alpha, beta
