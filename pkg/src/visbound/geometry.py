"""Upper half-plane model of the hyperbolic plane.

Points are ``x + iy`` with ``y > 0``; orientation-preserving isometries are
unit-determinant real 2x2 matrices acting by Moebius transformations.  All
objects are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

PARABOLIC_TRACE_TOL = 1e-10
DET_TOL = 1e-12
IDENTITY_TOL = 1e-10
# |c| below this times the largest entry is treated as c = 0 (g fixes infinity)
LOWER_LEFT_TOL = 1e-14


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class UhpPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (self.y > 0) or not math.isfinite(self.y) or not math.isfinite(self.x):
            raise GeometryError(f"point must satisfy y > 0, got ({self.x}, {self.y})")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "UhpPoint":
        return cls(z.real, z.imag)

    def to_json(self) -> list:
        return [self.x, self.y]


I = UhpPoint(0.0, 1.0)


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the real line or the point at infinity (``value is None``)."""

    value: Optional[float] = None

    @classmethod
    def infinity(cls) -> "BoundaryPoint":
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __repr__(self):
        return "BoundaryPoint(inf)" if self.value is None else f"BoundaryPoint({self.value!r})"


INFINITY = BoundaryPoint(None)


class IsometryType(str, Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class MoebiusIsometry:
    """Element of PSL(2, R).

    The determinant is checked to be 1 up to ``DET_TOL`` (relative to the
    squared entry size), then rescaled so it is 1 up to rounding.  The sign is
    canonicalized so that ``a > 0``, or ``a == 0`` and ``b > 0``.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = (float(v) for v in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        scale = max(1.0, a * a + b * b + c * c + d * d)
        if abs(det - 1.0) > DET_TOL * scale:
            raise GeometryError(f"determinant must be 1, got {det!r}")
        s = 1.0 / math.sqrt(det)
        if a < 0 or (a == 0 and b < 0):
            s = -s
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v * s)

    @classmethod
    def from_matrix(cls, m) -> "MoebiusIsometry":
        m = np.asarray(m, dtype=float).reshape(2, 2)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def normalized(cls, a, b, c, d) -> "MoebiusIsometry":
        """Rescale any positive-determinant matrix into PSL(2, R)."""
        det = a * d - b * c
        if det <= 0:
            raise GeometryError("matrix must have positive determinant")
        s = 1.0 / math.sqrt(det)
        return cls(a * s, b * s, c * s, d * s)

    @classmethod
    def identity(cls) -> "MoebiusIsometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def translation(cls, t: float) -> "MoebiusIsometry":
        return cls(1.0, t, 0.0, 1.0)

    @classmethod
    def dilation(cls, k: float) -> "MoebiusIsometry":
        """z -> k z for k > 0."""
        s = math.sqrt(k)
        return cls(s, 0.0, 0.0, 1.0 / s)

    @classmethod
    def to_infinity(cls, xi: float) -> "MoebiusIsometry":
        """z -> -1/(z - xi), sending the boundary point xi to infinity."""
        return cls(0.0, -1.0, 1.0, -xi)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> float:
        return self.a + self.d

    def __matmul__(self, other: "MoebiusIsometry") -> "MoebiusIsometry":
        m = self.matrix @ other.matrix
        return MoebiusIsometry.normalized(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def inverse(self) -> "MoebiusIsometry":
        return MoebiusIsometry(self.d, -self.b, -self.c, self.a)

    def __pow__(self, k: int) -> "MoebiusIsometry":
        base = self if k >= 0 else self.inverse()
        out = MoebiusIsometry.identity()
        for _ in range(abs(k)):
            out = out @ base
        return out

    def conjugate_by(self, h: "MoebiusIsometry") -> "MoebiusIsometry":
        """Return h g h^-1."""
        return h @ self @ h.inverse()

    def is_identity(self, tol: float = IDENTITY_TOL) -> bool:
        return (abs(self.a - 1) <= tol and abs(self.d - 1) <= tol
                and abs(self.b) <= tol and abs(self.c) <= tol)

    def key(self, digits: int = 9) -> tuple:
        """Hashable rounded representative, used for deduplication."""
        return tuple(round(v, digits) + 0.0 for v in (self.a, self.b, self.c, self.d))

    def act_boundary(self, z: BoundaryPoint) -> BoundaryPoint:
        a, b, c, d = self.a, self.b, self.c, self.d
        if z.is_infinite:
            if abs(c) <= LOWER_LEFT_TOL * max(abs(a), abs(b), abs(d)):
                return INFINITY
            return BoundaryPoint(a / c)
        den = c * z.value + d
        if den == 0:
            return INFINITY
        return BoundaryPoint((a * z.value + b) / den)

    def to_json(self) -> list:
        return [self.a, self.b, self.c, self.d]


def distance(p: UhpPoint, q: UhpPoint) -> float:
    """Hyperbolic distance, via sinh(d/2) = |p - q| / (2 sqrt(y_p y_q))."""
    chord = math.hypot(p.x - q.x, p.y - q.y)
    return 2.0 * math.asinh(chord / (2.0 * math.sqrt(p.y * q.y)))


def distance_array(x1, y1, x2, y2):
    """Vectorized ``distance`` over broadcastable coordinate arrays."""
    chord = np.hypot(np.subtract(x1, x2), np.subtract(y1, y2))
    return 2.0 * np.arcsinh(chord / (2.0 * np.sqrt(np.multiply(y1, y2))))


def apply(g: MoebiusIsometry, p: UhpPoint) -> UhpPoint:
    z = p.z
    w = (g.a * z + g.b) / (g.c * z + g.d)
    # Im w = y / |cz + d|^2 exactly; recomputing avoids cancellation.
    y = p.y / abs(g.c * z + g.d) ** 2
    return UhpPoint(w.real, y)


def displacement(g: MoebiusIsometry, p: UhpPoint) -> float:
    return distance(p, apply(g, p))


def displacement_array(g: MoebiusIsometry, x, y):
    z = np.asarray(x) + 1j * np.asarray(y)
    den = g.c * z + g.d
    w = (g.a * z + g.b) / den
    return distance_array(x, y, w.real, np.asarray(y) / np.abs(den) ** 2)


def classify(g: MoebiusIsometry) -> IsometryType:
    if g.is_identity():
        return IsometryType.IDENTITY
    t = abs(g.trace)
    if t > 2.0 + PARABOLIC_TRACE_TOL:
        return IsometryType.HYPERBOLIC
    if t < 2.0 - PARABOLIC_TRACE_TOL:
        return IsometryType.ELLIPTIC
    return IsometryType.PARABOLIC


def translation_length(g: MoebiusIsometry) -> float:
    if classify(g) is not IsometryType.HYPERBOLIC:
        raise GeometryError("no axis: isometry is not hyperbolic")
    return 2.0 * math.acosh(abs(g.trace) / 2.0)


def fixed_points(g: MoebiusIsometry) -> list[BoundaryPoint]:
    """Fixed points on the boundary: two for hyperbolic, one for parabolic."""
    kind = classify(g)
    if kind in (IsometryType.IDENTITY, IsometryType.ELLIPTIC):
        raise GeometryError(f"{kind.value} isometry has no isolated boundary fixed points")
    a, b, c, d = g.a, g.b, g.c, g.d
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if abs(c) <= LOWER_LEFT_TOL * scale:
        if kind is IsometryType.PARABOLIC:
            return [INFINITY]
        return [BoundaryPoint(b / (d - a)), INFINITY]
    # c z^2 + (d - a) z - b = 0
    if kind is IsometryType.PARABOLIC:
        return [BoundaryPoint((a - d) / (2.0 * c))]
    # discriminant (d - a)^2 + 4 b c = tr^2 - 4; stable form avoids cancellation for small c
    disc = math.sqrt((a + d) ** 2 - 4.0)
    q = -0.5 * ((d - a) + math.copysign(disc, d - a))
    roots = sorted([q / c, -b / q])
    return [BoundaryPoint(r) for r in roots]


def axis_endpoints(g: MoebiusIsometry) -> tuple[BoundaryPoint, BoundaryPoint]:
    """(repelling, attracting) fixed points of a hyperbolic isometry."""
    fp = fixed_points(g)
    if len(fp) != 2:
        raise GeometryError("no axis: isometry is not hyperbolic")
    p, q = fp
    # The attracting point is where the derivative of the boundary action is < 1.
    if q.is_infinite:
        return (p, q) if abs(g.a) > abs(g.d) else (q, p)
    deriv = 1.0 / (g.c * q.value + g.d) ** 2
    return (p, q) if deriv < 1 else (q, p)


def _to_infinity_map(z: BoundaryPoint) -> MoebiusIsometry:
    return MoebiusIsometry.identity() if z.is_infinite else MoebiusIsometry.to_infinity(z.value)


def busemann(z: BoundaryPoint, base: UhpPoint, p: UhpPoint) -> float:
    """Busemann function of the ray from ``base`` towards ``z``, evaluated at ``p``.

    Closed form ``ln y_base - ln y_p`` at infinity; finite centers are moved to
    infinity first.
    """
    g = _to_infinity_map(z)
    if not z.is_infinite:
        base, p = apply(g, base), apply(g, p)
    return math.log(base.y) - math.log(p.y)


@dataclass(frozen=True)
class Horoball:
    """Open horoball ``{busemann(center, i, .) < level}``."""

    center: BoundaryPoint
    level: float

    def contains(self, p: UhpPoint) -> bool:
        return horoball_contains(self, p)


def horoball_contains(hb: Horoball, p: UhpPoint) -> bool:
    return busemann(hb.center, I, p) < hb.level


@dataclass(frozen=True)
class GeodesicRay:
    """Unit speed ray with ``ray(0) = base`` converging to ``endpoint``."""

    base: UhpPoint
    endpoint: BoundaryPoint

    def __call__(self, t: float) -> UhpPoint:
        g = _to_infinity_map(self.endpoint)
        q = apply(g, self.base)
        q = UhpPoint(q.x, q.y * math.exp(t))
        return q if self.endpoint.is_infinite else apply(g.inverse(), q)
