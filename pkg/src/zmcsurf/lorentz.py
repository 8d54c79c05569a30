"""Linear algebra for Lorentz-Minkowski 3-space.

The metric is dx1^2 + dx2^2 - dx3^2: the third coordinate is the
time-like direction.  This convention is fixed throughout the package
and is not configurable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NULL_TOL",
    "CausalCharacter",
    "LorentzVec",
    "inner",
    "euclid_norm2",
    "causal_character",
]

# Relative tolerance for light-likeness.  Curves evaluated through truncated
# series are null only up to truncation error, so the test is scaled by the
# Euclidean magnitude of the vector.
NULL_TOL = 1e-10


class CausalCharacter(enum.Enum):
    SPACE_LIKE = "space-like"
    TIME_LIKE = "time-like"
    LIGHT_LIKE = "light-like"


@dataclass(frozen=True)
class LorentzVec:
    """A point or vector of Lorentz-Minkowski 3-space.

    Components must be finite; NaN/Inf are rejected so they cannot leak
    into downstream arithmetic.
    """

    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        for name, v in (("x1", self.x1), ("x2", self.x2), ("x3", self.x3)):
            if not math.isfinite(v):
                raise ValueError(f"non-finite component {name}={v!r}")

    @classmethod
    def from_array(cls, a) -> "LorentzVec":
        a = np.asarray(a, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    def __add__(self, other: "LorentzVec") -> "LorentzVec":
        return LorentzVec(self.x1 + other.x1, self.x2 + other.x2, self.x3 + other.x3)

    def __sub__(self, other: "LorentzVec") -> "LorentzVec":
        return LorentzVec(self.x1 - other.x1, self.x2 - other.x2, self.x3 - other.x3)

    def scaled(self, s: float) -> "LorentzVec":
        return LorentzVec(s * self.x1, s * self.x2, s * self.x3)


def _as_array(v) -> np.ndarray:
    if isinstance(v, LorentzVec):
        return v.as_array()
    return np.asarray(v, dtype=float)


def inner(a, b):
    """Lorentz inner product a1*b1 + a2*b2 - a3*b3.

    Accepts ``LorentzVec`` or array-likes of shape (..., 3); vectorizes
    over leading axes.  Returns a float for single vectors.
    """
    aa, bb = _as_array(a), _as_array(b)
    out = aa[..., 0] * bb[..., 0] + aa[..., 1] * bb[..., 1] - aa[..., 2] * bb[..., 2]
    if np.ndim(out) == 0:
        return float(out)
    return out


def euclid_norm2(v):
    """Euclidean squared magnitude, used to scale null-ness tests."""
    a = _as_array(v)
    out = np.sum(a * a, axis=-1)
    if np.ndim(out) == 0:
        return float(out)
    return out


def causal_character(v, tol: float = NULL_TOL) -> CausalCharacter:
    """Classify a vector as space-, time- or light-like.

    A vector counts as light-like when |<v,v>| <= tol * max(1, |v|^2_euclid);
    otherwise the sign of <v,v> decides.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    q = inner(v, v)
    threshold = tol * max(1.0, euclid_norm2(v))
    if abs(q) <= threshold:
        return CausalCharacter.LIGHT_LIKE
    return CausalCharacter.SPACE_LIKE if q > 0 else CausalCharacter.TIME_LIKE
