"""Weierstrass-type data extracted from Björling data, and reconstruction.

Space-like side: a complex-valued Gauss map g and 1-form coefficient
omega, stored as real/imaginary series pairs along the axis.  Time-like
side: the real quadruple (g1, g2, w1, w2) in characteristic variables,
always derived through the null-curve split alpha/beta (robust where L
vanishes), with the closed forms in gamma, L kept to the test suite as
oracles.

Conventions.  g = (gamma_1' + i gamma_2') / gamma_3' (or the same
quotient in L where gamma' vanishes) and omega = F_1' - i F_2' with
F = gamma - i Lam, which satisfies -g omega = F_3'.  Reconstruction
integrates ((1+g^2)/2, (i/2)(1-g^2), g) omega: with this g the time
coordinate integrand carries +g, which is what closes the round trip
against the Björling evaluator.  On the time-like side the quadruple is
normalized so that alpha' = (2 g1 w1, (1-g1^2) w1, (-1-g1^2) w1); the
surface is alpha(t) + beta(s) with no extra global factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bjorling import BjorlingData, MinDiamond
from .curves import Curve1, Curve3, PathIntegral, _LadderFunction
from .lorentz import LorentzVec
from .series import DEFAULT_ORDER, AnalyticCurve3, OutOfTrustRadius, PowerSeries, divide

__all__ = [
    "UndefinedGauss",
    "DegenerateCharacteristic",
    "MaxWeierstrass",
    "MinQuad",
    "max_gauss_from_bjorling",
    "maxface_from_weierstrass",
    "min_quad_from_bjorling",
    "minface_from_quad",
    "min_singular_locus",
    "MaxWeierstrassSurface",
    "MinQuadSurface",
]

_CONST_GUARD = 1e-12


class UndefinedGauss(Exception):
    """Neither branch of the Gauss-map quotient is defined."""


class DegenerateCharacteristic(Exception):
    """A characteristic denominator vanishes at the expansion center."""


# ----------------------------------------------------------------------
# space-like side


@dataclass
class MaxWeierstrass:
    """Gauss map and 1-form coefficient as real/imaginary series ladders."""

    g_re: Curve1
    g_im: Curve1
    omega_re: Curve1
    omega_im: Curve1
    interval: tuple[float, float]

    def g_many(self, ts) -> np.ndarray:
        return self.g_re.eval_many(ts) + 1j * self.g_im.eval_many(ts)

    def g_at_complex(self, z) -> np.ndarray:
        return self.g_re.eval_complex(z) + 1j * self.g_im.eval_complex(z)

    def omega_many(self, ts) -> np.ndarray:
        return self.omega_re.eval_many(ts) + 1j * self.omega_im.eval_many(ts)


def max_gauss_from_bjorling(data: BjorlingData, branch_tol: float = 1e-9) -> MaxWeierstrass:
    """Extract (g, omega) from the data.

    The quotient branch (through gamma_3' or through L_3) is chosen per
    expansion center by the larger constant-term magnitude; where both
    branches apply they are checked to agree to ``branch_tol``.
    """
    a, b = data.interval
    ts = np.linspace(a, b, 257)
    g3_sup = float(np.max(np.abs(data.gamma_prime.eval_many(ts)[:, 2])))
    l3_sup = 0.0 if data.L.is_zero else float(np.max(np.abs(data.L.eval_many(ts)[:, 2])))
    if g3_sup <= _CONST_GUARD and l3_sup <= _CONST_GUARD:
        raise UndefinedGauss(
            "gamma_3' and L_3 both vanish identically; no quotient branch applies")

    def g_pair(center: float, n: int) -> tuple[PowerSeries, PowerSeries]:
        gp = data.gamma_prime.at(center, n)
        den_g = abs(gp.c3.coeffs[0])
        lv = None if data.L.is_zero else data.L.at(center, n)
        den_l = 0.0 if lv is None else abs(lv.c3.coeffs[0])
        if max(den_g, den_l) <= _CONST_GUARD:
            raise UndefinedGauss(
                f"both quotient branches degenerate at center {center:g}")
        use_gamma = den_g >= den_l
        if use_gamma:
            re, im = divide(gp.c1, gp.c3), divide(gp.c2, gp.c3)
        else:
            re, im = divide(lv.c1, lv.c3), divide(lv.c2, lv.c3)
        if lv is not None and min(den_g, den_l) > 1e-6:
            other_re = (lv.c1.coeffs[0] / lv.c3.coeffs[0]) if use_gamma else (
                gp.c1.coeffs[0] / gp.c3.coeffs[0])
            other_im = (lv.c2.coeffs[0] / lv.c3.coeffs[0]) if use_gamma else (
                gp.c2.coeffs[0] / gp.c3.coeffs[0])
            diff = math.hypot(re.coeffs[0] - other_re, im.coeffs[0] - other_im)
            if diff > branch_tol * (1.0 + math.hypot(re.coeffs[0], im.coeffs[0])):
                raise UndefinedGauss(
                    f"Gauss-map branches disagree by {diff:.3e} at center {center:g}; "
                    "the data violates admissibility")
        return re, im

    g_re = Curve1(lambda c, n: g_pair(c, n)[0], data.interval, data.order)
    g_im = Curve1(lambda c, n: g_pair(c, n)[1], data.interval, data.order)

    def omega_pair(center: float, n: int) -> tuple[PowerSeries, PowerSeries]:
        gp = data.gamma_prime.at(center, n)
        if data.L.is_zero:
            return gp.c1, -gp.c2
        lv = data.L.at(center, n)
        return gp.c1 - lv.c2, -(gp.c2 + lv.c1)

    omega_re = Curve1(lambda c, n: omega_pair(c, n)[0], data.interval, data.order)
    omega_im = Curve1(lambda c, n: omega_pair(c, n)[1], data.interval, data.order)
    return MaxWeierstrass(g_re, g_im, omega_re, omega_im, data.interval)


class MaxWeierstrassSurface:
    """Evaluator integrating ((1+g^2)/2, (i/2)(1-g^2), g) omega from a base point.

    Antiderivatives are chained along the expansion ladder, so on simply
    connected rectangles the value is path independent by construction.
    """

    def __init__(self, wd: MaxWeierstrass, base: complex, basept: LorentzVec,
                 window: tuple[float, float] | None = None,
                 order: int = DEFAULT_ORDER):
        self.wd = wd
        self.base = complex(base)
        self.basept = basept.as_array()

        def integrand(center: float, n: int) -> list[PowerSeries]:
            gre = wd.g_re.at(center, n)
            gim = wd.g_im.at(center, n)
            ore = wd.omega_re.at(center, n)
            oim = wd.omega_im.at(center, n)
            g2re = gre * gre - gim * gim
            g2im = (gre * gim) * 2.0
            # phi1 = ((1 + g^2)/2) omega
            p1, q1 = (g2re + 1.0) * 0.5, g2im * 0.5
            phi1_re = p1 * ore - q1 * oim
            phi1_im = p1 * oim + q1 * ore
            # phi2 = ((i/2)(1 - g^2)) omega; the prefactor is (g2im/2) + i(1-g2re)/2
            p2, q2 = g2im * 0.5, (1.0 - g2re) * 0.5
            phi2_re = p2 * ore - q2 * oim
            phi2_im = p2 * oim + q2 * ore
            # phi3 = g omega
            phi3_re = gre * ore - gim * oim
            phi3_im = gre * oim + gim * ore
            return [phi1_re, phi1_im, phi2_re, phi2_im, phi3_re, phi3_im]

        win = window or wd.interval
        base_fn = _LadderFunction(integrand, win, order)
        self._F = PathIntegral(base_fn, x0=0.5 * (win[0] + win[1]))
        self._F_base = self._F_at(np.array(self.base, dtype=complex))

    def _F_at(self, z) -> np.ndarray:
        vals = self._F.eval_complex(z)
        return vals[..., 0::2] + 1j * vals[..., 1::2]

    def grid(self, us, vs) -> np.ndarray:
        us = np.atleast_1d(np.asarray(us, dtype=float))
        vs = np.atleast_1d(np.asarray(vs, dtype=float))
        z = us[:, None] + 1j * vs[None, :]
        f = self._F_at(z) - self._F_base
        return self.basept + f.real

    def at(self, u: float, v: float) -> LorentzVec:
        z = np.array(complex(u, v))
        f = self._F_at(z) - self._F_base
        return LorentzVec.from_array(self.basept + f.real)


def maxface_from_weierstrass(wd: MaxWeierstrass, base: complex, basept: LorentzVec,
                             window: tuple[float, float] | None = None,
                             order: int = DEFAULT_ORDER) -> MaxWeierstrassSurface:
    return MaxWeierstrassSurface(wd, base, basept, window, order)


# ----------------------------------------------------------------------
# time-like side


@dataclass
class MinQuad:
    """Real quadruple in characteristic variables plus its derivation record.

    g1, w1 are functions of the first characteristic variable t = u - v;
    g2, w2 of the second s = u + v.  c = L_3/gamma_3' and d = gamma_3'/L_3
    are the proportionality scalars where they exist; alpha, beta are the
    null curves the surface splits into.
    """

    g1: Curve1
    g2: Curve1
    w1hat: Curve1
    w2hat: Curve1
    c: Curve1 | None
    d: Curve1 | None
    alpha: Curve3
    beta: Curve3
    interval: tuple[float, float]
    x0: float


def _char_den(series: PowerSeries, center: float, label: str) -> PowerSeries:
    if abs(series.coeffs[0]) <= _CONST_GUARD:
        raise DegenerateCharacteristic(
            f"{label} vanishes at expansion center {center:g}; "
            "the quadruple is undefined there")
    return series


def min_quad_from_bjorling(data: BjorlingData, x0: float | None = None) -> MinQuad:
    """Quadruple through the null-curve split: g1 = a1'/(a2'-a3'), w1 = (a2'-a3')/2,
    g2 = -b1'/(b2'+b3'), w2 = (b2'+b3')/2."""
    from .bjorling import null_decompose

    alpha, beta = null_decompose(data, x0)
    ap = alpha.derivative()
    bp = beta.derivative()

    def g1_fn(c, n):
        d = ap.at(c, n)
        den = _char_den(d.c2 - d.c3, c, "alpha_2' - alpha_3'")
        return divide(d.c1, den)

    def w1_fn(c, n):
        d = ap.at(c, n)
        return (d.c2 - d.c3) * 0.5

    def g2_fn(c, n):
        d = bp.at(c, n)
        den = _char_den(d.c2 + d.c3, c, "beta_2' + beta_3'")
        return divide(-d.c1, den)

    def w2_fn(c, n):
        d = bp.at(c, n)
        return (d.c2 + d.c3) * 0.5

    def c_fn(c, n):
        gp = data.gamma_prime.at(c, n)
        if data.L.is_zero:
            return PowerSeries.zero(c, 0)
        lv = data.L.at(c, n)
        den = _char_den(gp.c3, c, "gamma_3'")
        return divide(lv.c3, den)

    def d_fn(c, n):
        if data.L.is_zero:
            raise DegenerateCharacteristic("L is exactly zero; d = gamma_3'/L_3 undefined")
        gp = data.gamma_prime.at(c, n)
        lv = data.L.at(c, n)
        den = _char_den(lv.c3, c, "L_3")
        return divide(gp.c3, den)

    iv = data.interval
    mid = 0.5 * (iv[0] + iv[1]) if x0 is None else float(x0)
    return MinQuad(
        g1=Curve1(g1_fn, iv, data.order),
        g2=Curve1(g2_fn, iv, data.order),
        w1hat=Curve1(w1_fn, iv, data.order),
        w2hat=Curve1(w2_fn, iv, data.order),
        c=Curve1(c_fn, iv, data.order),
        d=Curve1(d_fn, iv, data.order) if not data.L.is_zero else None,
        alpha=alpha,
        beta=beta,
        interval=iv,
        x0=mid,
    )


class MinQuadSurface:
    """Evaluator in characteristic coordinates for a quadruple.

    X(t, s) = basept + int_{t0}^{t} (2 g1, 1-g1^2, -1-g1^2) w1
                     + int_{s0}^{s} (-2 g2, 1-g2^2, 1+g2^2) w2.

    ``t_window``/``s_window`` restrict the antiderivative ladders to a
    subinterval on which the quadruple is regular (characteristic
    denominators of the data can vanish at isolated parameters, where the
    g's have poles).
    """

    def __init__(self, q: MinQuad, basept: LorentzVec,
                 origin: tuple[float, float] | None = None,
                 t_window: tuple[float, float] | None = None,
                 s_window: tuple[float, float] | None = None,
                 order: int = DEFAULT_ORDER):
        self.q = q
        self.basept = basept.as_array()
        t_win = t_window or q.interval
        s_win = s_window or q.interval
        t0 = origin[0] if origin else 0.5 * (t_win[0] + t_win[1])
        s0 = origin[1] if origin else 0.5 * (s_win[0] + s_win[1])
        self.origin = (float(t0), float(s0))

        def a_integrand(c, n):
            g1 = q.g1.at(c, n)
            w1 = q.w1hat.at(c, n)
            g1sq = g1 * g1
            return [(g1 * w1) * 2.0, (1.0 - g1sq) * w1, (-1.0 - g1sq) * w1]

        def b_integrand(c, n):
            g2 = q.g2.at(c, n)
            w2 = q.w2hat.at(c, n)
            g2sq = g2 * g2
            return [(g2 * w2) * (-2.0), (1.0 - g2sq) * w2, (1.0 + g2sq) * w2]

        self._A = PathIntegral(_LadderFunction(a_integrand, t_win, order), x0=self.origin[0])
        self._B = PathIntegral(_LadderFunction(b_integrand, s_win, order), x0=self.origin[1])

    def at(self, t: float, s: float) -> LorentzVec:
        val = self.basept + self._A.eval(t) + self._B.eval(s)
        return LorentzVec.from_array(val)

    def at_uv(self, u: float, v: float) -> LorentzVec:
        return self.at(u - v, u + v)

    def grid(self, ts, ss) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        ss = np.atleast_1d(np.asarray(ss, dtype=float))
        a = self._A.eval_many(ts)
        b = self._B.eval_many(ss)
        return self.basept + a[:, None, :] + b[None, :, :]


def minface_from_quad(q: MinQuad, basept: LorentzVec,
                      origin: tuple[float, float] | None = None,
                      t_window: tuple[float, float] | None = None,
                      s_window: tuple[float, float] | None = None,
                      order: int = DEFAULT_ORDER) -> MinQuadSurface:
    return MinQuadSurface(q, basept, origin, t_window, s_window, order)


# ----------------------------------------------------------------------
# singular locus of the time-like surface


def _eval_tolerant(curve: Curve1, xs: np.ndarray) -> np.ndarray:
    """Evaluate with NaN at points the local expansions cannot reach."""
    out = np.full(xs.shape, np.nan)
    flat = xs.ravel()
    res = out.ravel()
    for i, x in enumerate(flat):
        try:
            res[i] = curve.eval(float(x))
        except (DegenerateCharacteristic, OutOfTrustRadius):
            pass
    return out


def min_singular_locus(q: MinQuad, region: MinDiamond, grid: int = 64,
                       tol: float = 1e-10) -> list[tuple[float, float]]:
    """Locate the singular set {g1(u-v) g2(u+v) = 1} inside ``region``.

    Scans a grid x grid lattice over the region's bounding box and
    bisects every edge on which g1 g2 - 1 changes sign, to 1e-10 in the
    parameter.  Returns the located (u, v) points in scan order.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    u0, u1, v0, v1 = region.bbox()
    us = np.linspace(u0, u1, grid)
    vs = np.linspace(v0, v1, grid)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    inside = region.contains(uu, vv)

    g1v = _eval_tolerant(q.g1, uu - vv)
    g2v = _eval_tolerant(q.g2, uu + vv)
    G = g1v * g2v - 1.0
    G[~inside] = np.nan

    def g_at(u, v):
        return q.g1.eval(u - v) * q.g2.eval(u + v) - 1.0

    def bisect(pa, pb, fa, fb):
        for _ in range(60):
            mid = (0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1]))
            fm = g_at(*mid)
            if fm == 0.0:
                return mid
            if (fa < 0) != (fm < 0):
                pb, fb = mid, fm
            else:
                pa, fa = mid, fm
            if abs(pb[0] - pa[0]) + abs(pb[1] - pa[1]) < 1e-12:
                break
        return (0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1]))

    points: list[tuple[float, float]] = []
    for i in range(grid):
        for j in range(grid):
            f = G[i, j]
            if not np.isfinite(f):
                continue
            if abs(f) <= tol:
                points.append((float(us[i]), float(vs[j])))
                continue
            if i + 1 < grid and np.isfinite(G[i + 1, j]) and (f < 0) != (G[i + 1, j] < 0):
                points.append(bisect((us[i], vs[j]), (us[i + 1], vs[j]), f, G[i + 1, j]))
            if j + 1 < grid and np.isfinite(G[i, j + 1]) and (f < 0) != (G[i, j + 1] < 0):
                points.append(bisect((us[i], vs[j]), (us[i], vs[j + 1]), f, G[i, j + 1]))
    return points
