"""Thick-thin decomposition for explicitly generated groups acting on H^2.

The infimum over a group is replaced by a minimum over reduced words of
length at most ``word_cap``.  Flows and entry times are written for the
cusp-at-infinity normal form, where the flow lines are vertical geodesics;
other configurations are conjugated to that form first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy import ndimage

from .constants import ConstantsLedger, build_ledger, euclidean_ball_volume
from .geometry import (
    IsometryType,
    MoebiusIsometry,
    UhpPoint,
    apply,
    classify,
    displacement,
    displacement_array,
)


class ThickThinError(ValueError):
    pass


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple
    word_cap: int = 3

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if not self.generators:
            raise ThickThinError("group needs at least one generator")
        if self.word_cap < 1:
            raise ThickThinError("word_cap must be >= 1")
        for g in self.generators:
            kind = classify(g)
            if kind in (IsometryType.IDENTITY, IsometryType.ELLIPTIC):
                raise ThickThinError(f"generator {g.to_json()} is {kind.value}")

    @cached_property
    def ball(self) -> tuple:
        return tuple(_enumerate_ball(self.generators, self.word_cap))

    def with_cap(self, word_cap: int) -> "GroupPresentation":
        return GroupPresentation(self.generators, word_cap)


def _enumerate_ball(generators, word_cap: int) -> list[MoebiusIsometry]:
    letters = []
    seen_letters = set()
    for g in generators:
        for h in (g, g.inverse()):
            if h.key() not in seen_letters:
                seen_letters.add(h.key())
                letters.append(h)
    inverse_of = {}
    for i, h in enumerate(letters):
        hk = h.inverse().key()
        inverse_of[i] = next(j for j, l in enumerate(letters) if l.key() == hk)

    found: dict = {}
    frontier = [((i,), h) for i, h in enumerate(letters)]
    for _ in range(word_cap):
        nxt = []
        for word, g in frontier:
            if not g.is_identity() and g.key() not in found:
                found[g.key()] = g
            nxt.extend(((*word, j), g @ letters[j]) for j in range(len(letters))
                       if j != inverse_of[word[-1]])
        frontier = nxt
    return list(found.values())


def group_ball(g: GroupPresentation) -> list[MoebiusIsometry]:
    """Distinct non-identity elements given by reduced words of length <= word_cap."""
    return list(g.ball)


def d_Gamma(g: GroupPresentation, p: UhpPoint) -> float:
    return min(displacement(h, p) for h in g.ball)


def d_Gamma_array(g: GroupPresentation, x, y):
    out = np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, np.inf)
    for h in g.ball:
        np.minimum(out, displacement_array(h, x, y), out=out)
    return out


def trace_rule(eps: float, top: float, scale: float = 1.0) -> Callable[[MoebiusIsometry], float]:
    """A level rule depending only on |trace|, hence constant on conjugacy classes."""
    def rule(h: MoebiusIsometry) -> float:
        excess = max(abs(h.trace) - 2.0, 0.0)
        return eps + (top - eps) * math.exp(-excess / scale)
    return rule


@dataclass(frozen=True)
class EpsAssignment:
    epsilon: float
    margulis_eps: float = 0.32
    rule: Optional[Callable[[MoebiusIsometry], float]] = field(default=None, compare=False)

    def __post_init__(self):
        if not 0 < self.epsilon <= self.margulis_eps / 2:
            raise ThickThinError("need 0 < epsilon <= margulis_eps / 2")

    def level(self, h: MoebiusIsometry) -> float:
        if self.rule is None:
            return self.epsilon
        v = self.rule(h)
        if not self.epsilon - 1e-15 <= v <= self.margulis_eps / 2 + 1e-15:
            raise ThickThinError(f"level {v} outside [epsilon, margulis_eps/2]")
        return v


def is_thin(g: GroupPresentation, levels: EpsAssignment, p: UhpPoint) -> bool:
    return any(displacement(h, p) < levels.level(h) for h in g.ball)


def is_thin_array(g: GroupPresentation, levels: EpsAssignment, x, y):
    out = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape, dtype=bool)
    for h in g.ball:
        out |= displacement_array(h, x, y) < levels.level(h)
    return out


@dataclass(frozen=True)
class ThinRegion:
    group: GroupPresentation
    levels: EpsAssignment
    kind: str  # "tube" or "cusp"
    witnesses: tuple = ()


def thin_region_at(g: GroupPresentation, levels: EpsAssignment, p: UhpPoint) -> Optional[ThinRegion]:
    """The thin component containing p, typed by its short elements; None if p is thick."""
    short = tuple(h for h in g.ball if displacement(h, p) < levels.level(h))
    if not short:
        return None
    kinds = {classify(h) for h in short}
    if len(kinds) != 1:
        raise ThickThinError("mixed parabolic and hyperbolic witnesses at one point")
    kind = "cusp" if kinds == {IsometryType.PARABOLIC} else "tube"
    return ThinRegion(g, levels, kind, short)


def thin_boundary_height(eps: float) -> float:
    """Height y0 with {y > y0} the eps-thin part of <z -> z + 1>."""
    if eps <= 0:
        raise ThickThinError("eps must be positive")
    return 1.0 / (2.0 * math.sinh(eps / 2.0))


def entry_time(y_start: float, y_thick: float) -> float:
    """Time for the downward vertical flow line from height y_start to reach y_thick."""
    if not y_start > y_thick > 0:
        raise ThickThinError("already thick: need y_start > y_thick > 0")
    return math.log(y_start / y_thick)


def flow(p: UhpPoint, s: float, y_thick: float, y_thin: float = math.inf) -> UhpPoint:
    """Retraction of the collar y_thick < y <= y_thin onto {y = y_thick} at time s.

    Interpolates the flow-line parameter linearly between the current time and
    the entry time, which on vertical geodesics means ln y interpolates
    linearly.  Points outside the collar are returned unchanged.
    """
    if not 0.0 <= s <= 1.0:
        raise ThickThinError("flow time must lie in [0, 1]")
    if not y_thick < p.y <= y_thin or s == 0.0:
        return p
    if s == 1.0:
        return UhpPoint(p.x, y_thick)
    return UhpPoint(p.x, math.exp((1.0 - s) * math.log(p.y) + s * math.log(y_thick)))


def tube_radius(length: float, eps: float) -> float:
    """Distance from the axis at which a translation of ``length`` displaces by ``eps``.

    Uses sinh(d/2) = cosh(rho) sinh(length/2) for points at distance rho
    from the axis.
    """
    if not 0 < length < eps:
        raise ThickThinError("need 0 < translation length < eps for a nonempty tube")
    return math.acosh(math.sinh(eps / 2) / math.sinh(length / 2))


def tube_flow(p: UhpPoint, s: float, rho_thick: float, rho_thin: float = 0.0) -> UhpPoint:
    """Retraction onto {dist to the imaginary axis = rho_thick} along perpendiculars.

    Flow lines are the circles |z| = const, parametrized by signed distance to
    the axis, ``asinh(x / y)``.  Points whose distance lies outside
    [rho_thin, rho_thick) are returned unchanged.
    """
    if not 0.0 <= s <= 1.0:
        raise ThickThinError("flow time must lie in [0, 1]")
    rho = math.asinh(p.x / p.y)
    # points within rounding of the target circle count as already there
    if not rho_thin <= abs(rho) < rho_thick - 1e-12 or s == 0.0:
        return p
    target = math.copysign(rho_thick, rho if rho != 0 else 1.0)
    new = (1.0 - s) * rho + s * target
    R = abs(p.z)
    return UhpPoint(R * math.tanh(new), R / math.cosh(new))


def flow_normal_form(g: MoebiusIsometry, p: UhpPoint, s: float, y_thick: float,
                     y_thin: float = math.inf) -> UhpPoint:
    """Flow in the frame where ``g`` maps the component to the cusp-at-infinity form."""
    q = flow(apply(g, p), s, y_thick, y_thin)
    return apply(g.inverse(), q)


def component_count_bound(ledger: ConstantsLedger, vol: float) -> float:
    """vol / V(rho, n): bound on the number of thin components."""
    if vol <= 0:
        raise ThickThinError("volume must be positive")
    return vol / euclidean_ball_volume(ledger.rho, ledger.n)


def label_components(g: GroupPresentation, levels: EpsAssignment,
                     x_range: tuple, y_range: tuple, pitch: float):
    """Label thin components on a grid in (x, ln y) coordinates.

    Steps are chosen so adjacent grid points are within hyperbolic distance
    ``pitch`` of each other.  Returns (xs, ys, labels, count).
    """
    y0, y1 = y_range
    ns = max(2, int(math.ceil(math.log(y1 / y0) / pitch)) + 1)
    nx = max(2, int(math.ceil((x_range[1] - x_range[0]) / (pitch * y0))) + 1)
    xs = np.linspace(x_range[0], x_range[1], nx)
    ys = np.exp(np.linspace(math.log(y0), math.log(y1), ns))
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    thin = is_thin_array(g, levels, X, Y)
    labels, count = ndimage.label(thin, structure=np.ones((3, 3), dtype=int))
    return xs, ys, labels, count


def default_ledger() -> ConstantsLedger:
    return build_ledger(2)
