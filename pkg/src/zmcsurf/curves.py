"""Ladders of local Taylor expansions along an interval.

A curve defined by expressions is re-expanded around a precomputed
ladder of centers spaced at most 0.5 apart, so every evaluation stays
well inside each expansion's trust radius instead of extrapolating.
Antiderivatives are continued across the ladder by chaining integration
constants at the hand-off centers.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from . import dsl
from .series import DEFAULT_ORDER, AnalyticCurve3, PowerSeries

__all__ = ["LADDER_STEP", "Curve1", "Curve3", "PathIntegral"]

LADDER_STEP = 0.5


class _Ladder:
    """Nearest-center bookkeeping shared by all ladder-backed objects."""

    def __init__(self, interval: tuple[float, float], step: float = LADDER_STEP):
        a, b = float(interval[0]), float(interval[1])
        if not a < b:
            raise ValueError(f"interval must satisfy a < b, got ({a}, {b})")
        self.interval = (a, b)
        count = max(1, math.ceil((b - a) / step))
        self.h = (b - a) / count
        self.centers = a + self.h * (np.arange(count) + 0.5)

    def nearest_index(self, x) -> np.ndarray:
        a, _ = self.interval
        idx = np.floor((np.asarray(x, dtype=float) - a) / self.h).astype(int)
        return np.clip(idx, 0, len(self.centers) - 1)


class _LadderFunction:
    """A function expandable around any center, cached on the ladder."""

    def __init__(self, expand_fn: Callable, interval, order: int, step: float = LADDER_STEP):
        self._expand = expand_fn
        self.order = int(order)
        self.ladder = _Ladder(interval, step)
        self._cache: dict[int, object] = {}

    @property
    def interval(self):
        return self.ladder.interval

    def at(self, center: float, order: int | None = None):
        """Fresh expansion around an arbitrary center (not cached)."""
        return self._expand(float(center), self.order if order is None else int(order))

    def near(self, x: float):
        """Cached expansion around the ladder center nearest to x."""
        i = int(self.ladder.nearest_index(x))
        s = self._cache.get(i)
        if s is None:
            s = self._expand(float(self.ladder.centers[i]), self.order)
            self._cache[i] = s
        return s

    def _grouped(self, positions: np.ndarray):
        """Yield (expansion, boolean mask) pairs grouping by nearest center."""
        idx = self.ladder.nearest_index(positions)
        for i in np.unique(idx):
            s = self._cache.get(int(i))
            if s is None:
                s = self._expand(float(self.ladder.centers[i]), self.order)
                self._cache[int(i)] = s
            yield s, idx == i


class Curve1(_LadderFunction):
    """Scalar real-analytic function backed by per-center power series."""

    @classmethod
    def from_expr(cls, expr: dsl.Expr, interval, order: int = DEFAULT_ORDER) -> "Curve1":
        return cls(lambda c, n: dsl.lower(expr, c, n), interval, order)

    def eval_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        out = np.empty(ts.shape, dtype=float)
        flat = ts.ravel()
        res = out.ravel()
        for series, mask in self._grouped(flat):
            res[mask] = series(flat[mask])
        return out

    def eval(self, t: float) -> float:
        return float(self.eval_many(np.array([t]))[0])

    def eval_complex(self, zs) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        out = np.empty(zs.shape, dtype=complex)
        flat = zs.ravel()
        res = out.ravel()
        for series, mask in self._grouped(flat.real):
            res[mask] = series(flat[mask])
        return out

    def derivative(self) -> "Curve1":
        return Curve1(
            lambda c, n: self._expand(c, n + 1).derivative(), self.interval, self.order
        )


class Curve3(_LadderFunction):
    """Curve into R^3 backed by per-center ``AnalyticCurve3`` expansions."""

    def __init__(self, expand_fn, interval, order: int = DEFAULT_ORDER,
                 step: float = LADDER_STEP, is_zero: bool = False):
        super().__init__(expand_fn, interval, order, step)
        self.is_zero = bool(is_zero)

    @classmethod
    def from_exprs(cls, exprs: Sequence[dsl.Expr], interval, order: int = DEFAULT_ORDER) -> "Curve3":
        e1, e2, e3 = exprs

        def expand(center, n):
            return AnalyticCurve3(
                dsl.lower(e1, center, n), dsl.lower(e2, center, n), dsl.lower(e3, center, n)
            )

        return cls(expand, interval, order)

    @classmethod
    def from_expr_strings(cls, texts: Sequence[str], interval, order: int = DEFAULT_ORDER) -> "Curve3":
        return cls.from_exprs([dsl.parse(s) for s in texts], interval, order)

    @classmethod
    def zero(cls, interval, order: int = DEFAULT_ORDER) -> "Curve3":
        def expand(center, n):
            z = PowerSeries.zero(center, 0)
            return AnalyticCurve3(z, z, z)

        return cls(expand, interval, order, is_zero=True)

    @classmethod
    def from_series(cls, curve: AnalyticCurve3, interval) -> "Curve3":
        """Back a ladder by Taylor-shifting a single given expansion."""
        return cls(
            lambda c, n: curve.map(lambda s: s.recenter(c)), interval, curve.order
        )

    def eval_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        out = np.empty(ts.shape + (3,), dtype=float)
        flat = ts.ravel()
        res = out.reshape(-1, 3)
        for curve, mask in self._grouped(flat):
            res[mask] = np.stack([s(flat[mask]) for s in curve.components], axis=-1)
        return out

    def eval(self, t: float) -> np.ndarray:
        return self.eval_many(np.array([t]))[0]

    def eval_complex(self, zs) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        out = np.empty(zs.shape + (3,), dtype=complex)
        flat = zs.ravel()
        res = out.reshape(-1, 3)
        for curve, mask in self._grouped(flat.real):
            res[mask] = np.stack([s(flat[mask]) for s in curve.components], axis=-1)
        return out

    def derivative(self) -> "Curve3":
        return Curve3(
            lambda c, n: self._expand(c, n + 1).derivative(),
            self.interval,
            self.order,
            is_zero=self.is_zero,
        )

    def sup_norm(self, samples: int = 1024) -> float:
        """max over sampled t of the max component magnitude."""
        a, b = self.interval
        vals = self.eval_many(np.linspace(a, b, samples))
        return float(np.max(np.abs(vals)))


class PathIntegral:
    """Antiderivative of a ladder-backed function, continued along the ladder.

    Works componentwise on the list of series an expansion provides, so the
    same machinery integrates scalar functions, curves into R^3, and
    real/imaginary series pairs of holomorphic integrands.  Integration
    constants are chained so that adjacent local antiderivatives agree at
    the hand-off centers; the whole object is anchored to vanish at x0.
    """

    def __init__(self, base: _LadderFunction, x0: float | None = None):
        self.base = base
        a, b = base.interval
        self.x0 = 0.5 * (a + b) if x0 is None else float(x0)
        self.ladder = base.ladder
        centers = self.ladder.centers
        self._series: list[list[PowerSeries]] = []
        for c in centers:
            expansion = base._expand(float(c), base.order)
            self._series.append([s.antiderivative(0.0) for s in _series_list(expansion)])
        m = len(self._series[0])
        k = np.zeros((len(centers), m))
        for i in range(len(centers) - 1):
            step_val = np.array([s(centers[i + 1]) for s in self._series[i]])
            k[i + 1] = k[i] + step_val
        # anchor: value at x0 must vanish
        j = int(self.ladder.nearest_index(self.x0))
        anchor = k[j] + np.array([s(self.x0) for s in self._series[j]])
        self.offsets = k - anchor

    @property
    def interval(self):
        return self.base.interval

    def _eval(self, flat: np.ndarray, keys: np.ndarray, dtype) -> np.ndarray:
        m = len(self._series[0])
        out = np.empty((len(flat), m), dtype=dtype)
        idx = self.ladder.nearest_index(keys)
        for i in np.unique(idx):
            mask = idx == i
            pts = flat[mask]
            vals = np.stack([s(pts) for s in self._series[i]], axis=-1)
            out[mask] = vals + self.offsets[i]
        return out

    def eval_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        flat = ts.ravel()
        out = self._eval(flat, flat, float)
        return out.reshape(ts.shape + (out.shape[-1],))

    def eval(self, t: float) -> np.ndarray:
        return self.eval_many(np.array([t]))[0]

    def eval_complex(self, zs) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        flat = zs.ravel()
        out = self._eval(flat, flat.real, complex)
        return out.reshape(zs.shape + (out.shape[-1],))

    def at(self, center: float, order: int | None = None) -> list[PowerSeries]:
        """Local antiderivative expansion around an arbitrary center."""
        n = self.base.order if order is None else int(order)
        expansion = self.base.at(center, n)
        values = self.eval(center)
        return [
            s.antiderivative(float(v))
            for s, v in zip(_series_list(expansion), values)
        ]


def _series_list(expansion) -> list[PowerSeries]:
    if isinstance(expansion, PowerSeries):
        return [expansion]
    if isinstance(expansion, AnalyticCurve3):
        return list(expansion.components)
    return list(expansion)
