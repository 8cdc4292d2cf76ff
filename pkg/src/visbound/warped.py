"""Warped-product cusp metrics ``h(t)^2 ds^2 + dt^2`` on T^{n-1} x [0, inf).

The warp ``h`` equals ``exp(-t)`` on [0, 1] and ``1/t^2`` on [3, inf).  On
(1, 3) it is ``exp(u(t))`` for a polynomial ``u`` of degree 8 that matches
value, first and second derivative of ``-t`` at 1 and of ``-2 ln t`` at 3, so
``h`` is C^2 across both joins.  The three free coefficients were chosen to
keep ``min(h''/h, (h'/h)^2)`` away from zero on the bridge.

Sectional curvature of a plane spanned by a unit fibre vector and a unit
vector with base component ``Y`` is

    K = -(h''/h) Y^2 - (h'/h)^2 (1 - Y^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

# Coefficients of the free factor r(s) in u = u_min + s^3 (s - 2)^3 r(s), s = t - 1.
DEFAULT_BRIDGE = (-0.2155, 0.1805, -0.0363)

# Hard limits on the bridge; a candidate outside them is rejected.
K_LOWER = -11.0
K_UPPER_MIDDLE = -0.04


class WarpError(ValueError):
    pass


def _minimal_bridge() -> Polynomial:
    """Unique quintic in s = t - 1 with the six C^2 matching conditions."""
    rows, rhs = [], []
    for s0, (v, dv, ddv) in ((0.0, (-1.0, -1.0, 0.0)),
                             (2.0, (-2.0 * math.log(3.0), -2.0 / 3.0, 2.0 / 9.0))):
        rows.append([s0 ** k for k in range(6)])
        rows.append([k * s0 ** (k - 1) if k >= 1 else 0.0 for k in range(6)])
        rows.append([k * (k - 1) * s0 ** (k - 2) if k >= 2 else 0.0 for k in range(6)])
        rhs.extend([v, dv, ddv])
    return Polynomial(np.linalg.solve(np.array(rows), np.array(rhs)))


@dataclass(frozen=True)
class WarpFunction:
    """Flattening warp function; ``grid`` is the verification resolution."""

    bridge: tuple = DEFAULT_BRIDGE
    grid: int = 10_000
    _u: Polynomial = field(init=False, repr=False, compare=False)
    _du: Polynomial = field(init=False, repr=False, compare=False)
    _ddu: Polynomial = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vanish = Polynomial([0, 0, 0, 1]) * Polynomial([-2, 1]) ** 3
        u = _minimal_bridge() + vanish * Polynomial(list(self.bridge))
        object.__setattr__(self, "_u", u)
        object.__setattr__(self, "_du", u.deriv(1))
        object.__setattr__(self, "_ddu", u.deriv(2))
        problems = self.verify()
        if problems:
            raise WarpError("bridge rejected: " + "; ".join(problems))

    def log_derivatives(self, t):
        """(u, u', u'') of u = log h, vectorized over t >= 0."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise WarpError("warp function is defined for t >= 0")
        s = t - 1.0
        u0, u1, u2 = self._u(s), self._du(s), self._ddu(s)
        lo, hi = t <= 1.0, t >= 3.0
        safe = np.where(hi, t, 3.0)
        u0 = np.where(lo, -t, np.where(hi, -2.0 * np.log(safe), u0))
        u1 = np.where(lo, -1.0, np.where(hi, -2.0 / safe, u1))
        u2 = np.where(lo, 0.0, np.where(hi, 2.0 / safe ** 2, u2))
        return u0, u1, u2

    def kinks(self) -> list:
        """Points of (1, 3) where (log h)'' changes sign, i.e. where h''/h crosses (h'/h)^2."""
        roots = self._ddu.roots()
        real = roots[np.abs(roots.imag) < 1e-9].real + 1.0
        return sorted(float(t) for t in real if 1.0 < t < 3.0
                      and self._ddu(t - 1.0 - 1e-7) * self._ddu(t - 1.0 + 1e-7) < 0)

    def ratios(self, t):
        """(h''/h, (h'/h)^2)."""
        _, u1, u2 = self.log_derivatives(t)
        return u2 + u1 * u1, u1 * u1

    def __call__(self, t):
        return h_eval(self, t)

    def verify(self) -> list[str]:
        """Sampled checks of the warp properties; returns failure messages."""
        out = []
        t = np.linspace(0.0, 100.0, self.grid * 10 + 1)
        h, hp, hpp = h_eval(self, t)
        if not (np.all(h > 0) and np.all(hp < 0)):
            out.append("h must be positive and decreasing")
        if not np.all(hpp > 0):
            out.append("h'' must be positive")
        tm = np.linspace(1.0, 3.0, self.grid + 1)[1:-1]
        q, r = self.ratios(tm)
        if np.max(np.maximum(q, r)) > -K_LOWER:
            out.append("curvature below -11 on (1, 3)")
        if np.min(np.minimum(q, r)) < -K_UPPER_MIDDLE:
            out.append("curvature above -0.04 on (1, 3)")
        return out


def h_eval(w: WarpFunction, t):
    """Return (h, h', h'') at t (scalar or array)."""
    u0, u1, u2 = w.log_derivatives(t)
    h = np.exp(u0)
    hp = u1 * h
    hpp = (u2 + u1 * u1) * h
    if np.ndim(t) == 0:
        return float(h), float(hp), float(hpp)
    return h, hp, hpp


@dataclass(frozen=True)
class TangentPlaneSpec:
    t: float
    Y: float

    def __post_init__(self):
        if self.t < 0:
            raise WarpError("t must be >= 0")
        if abs(self.Y) > 1:
            raise WarpError("|Y| must be <= 1")


@dataclass(frozen=True)
class CuspModel:
    n: int = 2
    torus_volume: float = 1.0
    warp: WarpFunction = field(default_factory=WarpFunction)

    def __post_init__(self):
        if self.n < 2:
            raise WarpError("dimension must be >= 2")
        if not self.torus_volume > 0:
            raise WarpError("torus volume must be positive")


def sectional_curvature(m: CuspModel, p: TangentPlaneSpec) -> float:
    return float(curvature_array(m, p.t, p.Y))


def curvature_array(m: CuspModel, t, Y):
    """Vectorized sectional curvature over broadcastable (t, Y)."""
    q, r = m.warp.ratios(t)
    y2 = np.square(Y)
    return -q * y2 - r * (1.0 - y2)


def curvature_range(m: CuspModel, t):
    """(K_min, K_max) over all planes at height t; K is linear in Y^2."""
    q, r = m.warp.ratios(t)
    lo, hi = -np.maximum(q, r), -np.minimum(q, r)
    if np.ndim(t) == 0:
        return float(lo), float(hi)
    return lo, hi


def radial_curvature(m: CuspModel, t):
    """Smallest |K| over planes containing the radial direction."""
    q, r = m.warp.ratios(t)
    return np.minimum(q, r)


def visibility_integral(m: CuspModel, T: float, epsabs: float = 1e-9) -> float:
    """Integral of k(t) t over [1, T], k the minimal radial curvature magnitude."""
    if T < 1:
        raise WarpError("upper limit must be >= 1")
    if T == 1:
        return 0.0
    f = lambda s: float(radial_curvature(m, s)) * s
    total = 0.0
    for a, b in ((1.0, min(T, 3.0)), (3.0, T)):
        if b > a:
            # the integrand is a minimum of two smooth terms: split where they cross
            kinks = [k for k in m.warp.kinks() if a < k < b] or None
            val, _ = integrate.quad(f, a, b, epsabs=epsabs, epsrel=1e-12, limit=200, points=kinks)
            total += val
    return total


def cusp_volume(m: CuspModel, t0: float = 3.0, literal_integrand: bool = False) -> float:
    """Volume of T^{n-1} x (t0, inf) in the warped metric.

    The volume form carries ``h^(n-1)``.  ``literal_integrand=True`` integrates
    ``h`` itself regardless of n, which is the integrand written in the finite
    volume computation of the flattened cusp; for n = 2 the two agree.
    """
    if t0 < 0:
        raise WarpError("t0 must be >= 0")
    p = 1 if literal_integrand else m.n - 1
    start = max(t0, 3.0)
    # int_start^inf t^(-2p) dt
    tail = start ** (1 - 2 * p) / (2 * p - 1)
    head = 0.0
    if t0 < 3.0:
        head, _ = integrate.quad(lambda s: h_eval(m.warp, s)[0] ** p, t0, 3.0,
                                 epsabs=1e-12, epsrel=1e-12, points=[1.0] if t0 < 1 else None)
    return m.torus_volume * (head + tail)
