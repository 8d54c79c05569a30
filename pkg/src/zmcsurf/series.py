"""Truncated power series in one real variable, evaluable at complex points.

A ``PowerSeries`` is a Taylor polynomial sum a_k (z - center)^k together
with a trust radius bounding how far from the center evaluation is
considered accurate.  Exact polynomials carry an infinite trust radius;
truncations of transcendental functions carry a finite one.  All
coefficients are real; evaluation at a complex argument realizes the
analytic continuation of the represented real-analytic function.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "DEFAULT_ORDER",
    "SeriesError",
    "OutOfTrustRadius",
    "CenterMismatch",
    "DivisionBySingularSeries",
    "PowerSeries",
    "AnalyticCurve3",
    "lorentz_product",
]

DEFAULT_ORDER = 32

# Absolute floor on a divisor's constant coefficient.  Below this the
# evaluation point sits on (or numerically on) a zero of the denominator.
DIVISOR_TOL = 1e-12


class SeriesError(Exception):
    pass


class OutOfTrustRadius(SeriesError):
    """Evaluation or recentering outside the series' trusted disk."""


class CenterMismatch(SeriesError):
    """Binary operation on series expanded around different centers."""


class DivisionBySingularSeries(SeriesError):
    """Division by a series whose constant coefficient vanishes."""


def _known_order(s: "PowerSeries") -> int | None:
    """Order up to which coefficients are trustworthy; None for exact polys."""
    return None if s.is_exact else s.order


class PowerSeries:
    __slots__ = ("center", "coeffs", "trust_radius")

    def __init__(self, center: float, coeffs, trust_radius: float = math.inf):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite series coefficient")
        if not trust_radius > 0:
            raise ValueError("trust_radius must be positive")
        self.center = float(center)
        self.coeffs = c
        self.coeffs.setflags(write=False)
        self.trust_radius = float(trust_radius)

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def constant(cls, value: float, center: float = 0.0) -> "PowerSeries":
        return cls(center, [value])

    @classmethod
    def variable(cls, center: float = 0.0) -> "PowerSeries":
        """The identity function t, expanded around ``center``."""
        return cls(center, [center, 1.0])

    @classmethod
    def zero(cls, center: float = 0.0, order: int = 0) -> "PowerSeries":
        return cls(center, np.zeros(order + 1))

    # ------------------------------------------------------------------
    # basics

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_exact(self) -> bool:
        return math.isinf(self.trust_radius)

    def __repr__(self):
        head = np.array2string(self.coeffs[: min(6, len(self.coeffs))], precision=6)
        tail = "..." if len(self.coeffs) > 6 else ""
        return (
            f"PowerSeries(center={self.center:g}, order={self.order}, "
            f"coeffs={head}{tail}, trust={self.trust_radius:g})"
        )

    def padded(self, order: int) -> "PowerSeries":
        """Same series with zero coefficients appended up to ``order``."""
        if order < self.order:
            raise ValueError("padded() cannot drop coefficients; use truncated()")
        c = np.zeros(order + 1)
        c[: len(self.coeffs)] = self.coeffs
        return PowerSeries(self.center, c, self.trust_radius)

    def truncated(self, order: int) -> "PowerSeries":
        if order >= self.order:
            return self.padded(order)
        return PowerSeries(self.center, self.coeffs[: order + 1], self.trust_radius)

    # ------------------------------------------------------------------
    # evaluation

    def __call__(self, z):
        """Horner evaluation at a real or complex scalar or ndarray.

        Raises OutOfTrustRadius when |z - center| exceeds the trust
        radius: the caller must re-center instead of extrapolating.
        """
        zz = np.asarray(z)
        w = zz - self.center
        if not self.is_exact:
            lim = self.trust_radius * (1.0 + 1e-9) + 1e-12
            if np.any(np.abs(w) > lim):
                worst = float(np.max(np.abs(w)))
                raise OutOfTrustRadius(
                    f"evaluation at distance {worst:.6g} from center {self.center:g} "
                    f"exceeds trust radius {self.trust_radius:.6g}"
                )
        acc = np.full_like(w, self.coeffs[-1], dtype=w.dtype if w.dtype.kind == "c" else float)
        for k in range(len(self.coeffs) - 2, -1, -1):
            acc = acc * w + self.coeffs[k]
        if zz.ndim == 0:
            return complex(acc) if np.iscomplexobj(acc) else float(acc)
        return acc

    # ------------------------------------------------------------------
    # calculus

    def derivative(self) -> "PowerSeries":
        """Term-wise derivative; the order drops by one."""
        if self.order == 0:
            return PowerSeries(self.center, [0.0], self.trust_radius)
        k = np.arange(1, len(self.coeffs))
        return PowerSeries(self.center, self.coeffs[1:] * k, self.trust_radius)

    def antiderivative(self, value_at_center: float = 0.0) -> "PowerSeries":
        """Term-wise antiderivative with prescribed value at the center."""
        k = np.arange(1, len(self.coeffs) + 1)
        c = np.concatenate(([value_at_center], self.coeffs / k))
        return PowerSeries(self.center, c, self.trust_radius)

    # ------------------------------------------------------------------
    # arithmetic

    def _check_center(self, other: "PowerSeries"):
        if self.center != other.center:
            raise CenterMismatch(
                f"centers differ: {self.center!r} vs {other.center!r}"
            )

    def __neg__(self):
        return PowerSeries(self.center, -self.coeffs, self.trust_radius)

    def __add__(self, other):
        if not isinstance(other, PowerSeries):
            c = self.coeffs.copy()
            c[0] += float(other)
            return PowerSeries(self.center, c, self.trust_radius)
        self._check_center(other)
        ka, kb = _known_order(self), _known_order(other)
        if ka is None and kb is None:
            n = max(self.order, other.order)
        else:
            n = min(k for k in (ka, kb) if k is not None)
        a = self.truncated(n).coeffs
        b = other.truncated(n).coeffs
        return PowerSeries(self.center, a + b, min(self.trust_radius, other.trust_radius))

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        if isinstance(other, PowerSeries):
            return self.__add__(-other)
        return self.__add__(-float(other))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries(self.center, self.coeffs * float(other), self.trust_radius)
        self._check_center(other)
        full = np.convolve(self.coeffs, other.coeffs)
        ka, kb = _known_order(self), _known_order(other)
        if ka is None and kb is None:
            n = len(full) - 1
        else:
            # the Cauchy coefficient at index k needs every factor coefficient
            # up to k, so knowledge stops at the smaller truncation order
            n = min(k for k in (ka, kb) if k is not None)
            n = min(n, len(full) - 1)
        return PowerSeries(
            self.center, full[: n + 1], min(self.trust_radius, other.trust_radius)
        )

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if not isinstance(other, PowerSeries):
            return self.__mul__(1.0 / float(other))
        return divide(self, other)

    # ------------------------------------------------------------------
    # recentering

    def recenter(self, new_center: float) -> "PowerSeries":
        """Taylor-shift the expansion to ``new_center``.

        Requires |new_center - center| < trust_radius; the shifted series
        keeps only the coefficients the truncation supports, and a finite
        trust radius shrinks by the shift distance.
        """
        d = float(new_center) - self.center
        if d == 0.0:
            return self
        if not self.is_exact and abs(d) >= self.trust_radius:
            raise OutOfTrustRadius(
                f"recenter shift {abs(d):.6g} >= trust radius {self.trust_radius:.6g}"
            )
        c = self.coeffs.astype(float).copy()
        n = len(c)
        # synthetic-division Taylor shift
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                c[j] += d * c[j + 1]
        trust = math.inf if self.is_exact else self.trust_radius - abs(d)
        return PowerSeries(new_center, c, trust)


def divide(a: PowerSeries, b: PowerSeries, order: int | None = None) -> PowerSeries:
    """Series division a/b by the recursive coefficient formula.

    The divisor must have a non-vanishing constant coefficient.  The
    result's trust radius is additionally capped by the distance from the
    center to the nearest root of the (truncated) divisor, since the
    quotient cannot converge past a pole.
    """
    a._check_center(b)
    b0 = b.coeffs[0]
    if abs(b0) <= DIVISOR_TOL:
        raise DivisionBySingularSeries(
            f"divisor constant coefficient {b0:.3e} at center {b.center:g} "
            "is below tolerance; evaluate the limit pointwise or re-center"
        )
    ka, kb = _known_order(a), _known_order(b)
    if order is not None:
        n = order
    elif ka is None and kb is None:
        n = max(DEFAULT_ORDER, a.order, b.order)
    else:
        n = min(k for k in (ka, kb) if k is not None)
    ac = a.truncated(n).coeffs if a.order != n else a.coeffs
    if len(ac) != n + 1:
        ac = np.pad(a.coeffs, (0, max(0, n + 1 - len(a.coeffs))))[: n + 1]
    bc = np.pad(b.coeffs, (0, max(0, n + 1 - len(b.coeffs))))[: n + 1]
    q = np.zeros(n + 1)
    q[0] = ac[0] / b0
    for k in range(1, n + 1):
        q[k] = (ac[k] - np.dot(bc[1 : k + 1], q[k - 1 :: -1])) / b0
    trust = min(a.trust_radius, b.trust_radius, _nearest_divisor_root(bc))
    return PowerSeries(a.center, q, trust)


def _nearest_divisor_root(bc: np.ndarray) -> float:
    """Distance from the expansion center to the nearest divisor root."""
    c = np.trim_zeros(bc, "b")
    if len(c) <= 1:
        return math.inf
    roots = np.roots(c[::-1])
    if len(roots) == 0:
        return math.inf
    return float(np.min(np.abs(roots)))


# ----------------------------------------------------------------------
# three-component curves


class AnalyticCurve3:
    """Three power series sharing a center: a real-analytic curve into R^3.

    Component orders are harmonized on construction: exact polynomial
    components are zero-padded up to the common truncation order.
    """

    __slots__ = ("c1", "c2", "c3")

    def __init__(self, c1: PowerSeries, c2: PowerSeries, c3: PowerSeries):
        if not (c1.center == c2.center == c3.center):
            raise CenterMismatch("curve components must share a center")
        comps = (c1, c2, c3)
        known = [k for k in map(_known_order, comps) if k is not None]
        target = min(known) if known else max(s.order for s in comps)
        self.c1, self.c2, self.c3 = (s.truncated(target) for s in comps)

    @property
    def center(self) -> float:
        return self.c1.center

    @property
    def order(self) -> int:
        return self.c1.order

    @property
    def trust_radius(self) -> float:
        return min(s.trust_radius for s in self.components)

    @property
    def components(self):
        return (self.c1, self.c2, self.c3)

    def __call__(self, z):
        """Evaluate all three components; returns shape (..., 3)."""
        vals = [s(z) for s in self.components]
        if np.ndim(vals[0]) == 0:
            return np.array(vals)
        return np.stack(vals, axis=-1)

    def derivative(self) -> "AnalyticCurve3":
        return AnalyticCurve3(*(s.derivative() for s in self.components))

    def antiderivative(self, values=(0.0, 0.0, 0.0)) -> "AnalyticCurve3":
        return AnalyticCurve3(
            *(s.antiderivative(v) for s, v in zip(self.components, values))
        )

    def map(self, f) -> "AnalyticCurve3":
        return AnalyticCurve3(*(f(s) for s in self.components))


def lorentz_product(a: AnalyticCurve3, b: AnalyticCurve3) -> PowerSeries:
    """Series of the Lorentz inner product <a(t), b(t)>."""
    return a.c1 * b.c1 + a.c2 * b.c2 - a.c3 * b.c3
