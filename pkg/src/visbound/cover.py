"""Covers, nets and nerves.

Hyperbolic balls in the upper half-plane are Euclidean discs, which makes
exact intersection tests cheap: a family of closed discs meets iff some
center or some pairwise boundary-crossing point lies in every disc.  Open
balls are handled by strict inequalities, which only differ on tangencies.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import mpmath
import numpy as np

from .constants import ConstantsLedger, N_packing  # noqa: F401  (re-exported)
from .constants import complexity_constants as _complexity_constants
from .constants import refinement_budget as _refinement_budget
from .geometry import UhpPoint, distance_array
from .homology import SimplicialComplex


class CoverError(ValueError):
    pass


Metric = Callable[..., np.ndarray]


def quotient_metric(period: float) -> Metric:
    """Distance in H^2 / <z -> z + period>, for points at most one period apart."""
    def metric(x1, y1, x2, y2):
        dx = np.subtract(x1, x2)
        dx = dx - period * np.round(dx / period)
        return distance_array(dx, y1, 0.0, y2)
    return metric


@dataclass(frozen=True)
class Net:
    centers: tuple
    separation: float

    @property
    def xy(self) -> np.ndarray:
        return np.array([[p.x, p.y] for p in self.centers]).reshape(-1, 2)

    def __len__(self):
        return len(self.centers)


def greedy_net(xs, ys, separation: float, metric: Metric = distance_array) -> Net:
    """Maximal separated subset, scanning candidates in the given order.

    A candidate is kept if it is at distance >= separation from every kept
    point, so every candidate ends within ``separation`` of the net.
    """
    if separation <= 0:
        raise CoverError("separation must be positive")
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    nearest = np.full(xs.shape, np.inf)
    chosen = []
    for i in range(xs.size):
        if nearest[i] >= separation:
            chosen.append(i)
            np.minimum(nearest, metric(xs, ys, xs[i], ys[i]), out=nearest)
    return Net(tuple(UhpPoint(float(xs[i]), float(ys[i])) for i in chosen), separation)


def net_is_separated(net: Net, metric: Metric = distance_array) -> bool:
    xy = net.xy
    if len(xy) < 2:
        return True
    d = metric(xy[:, None, 0], xy[:, None, 1], xy[None, :, 0], xy[None, :, 1])
    np.fill_diagonal(d, np.inf)
    return bool(d.min() >= net.separation * (1 - 1e-12))


def net_covers(net: Net, xs, ys, radius: float, metric: Metric = distance_array) -> bool:
    xy = net.xy
    if len(xy) == 0:
        return np.size(xs) == 0
    d = metric(np.ravel(xs)[:, None], np.ravel(ys)[:, None], xy[None, :, 0], xy[None, :, 1])
    return bool(np.all(d.min(axis=1) <= radius))


@dataclass(frozen=True)
class CoverSet:
    """Hyperbolic ball, optionally extended along the cusp flow.

    A stabilized set is ``(B cap {y <= y_thick}) cup A`` where ``A`` is the
    open box ``footprint x (y_thick, collar_top)``; ``footprint`` is the open
    chord of ``B`` along ``y = y_thick``.
    """

    center: UhpPoint
    radius: float
    stabilized: bool = False
    y_thick: Optional[float] = None
    collar_top: Optional[float] = None
    footprint: Optional[tuple] = None
    period: Optional[float] = None

    @property
    def disc(self) -> tuple:
        """Euclidean center height and radius of the ball."""
        return (self.center.y * math.cosh(self.radius), self.center.y * math.sinh(self.radius))

    def _dx(self, x):
        dx = np.asarray(x, dtype=float) - self.center.x
        if self.period is not None:
            dx = dx - self.period * np.round(dx / self.period)
        return dx

    def contains_array(self, x, y):
        dx = self._dx(x)
        y = np.asarray(y, dtype=float)
        in_ball = distance_array(dx, y, 0.0, self.center.y) < self.radius
        if not self.stabilized:
            return in_ball
        lo, hi = self.footprint
        in_collar = (dx > lo - self.center.x) & (dx < hi - self.center.x) \
            & (y > self.y_thick) & (y < self.collar_top)
        return (in_ball & (y <= self.y_thick)) | in_collar

    def contains(self, p: UhpPoint) -> bool:
        return bool(self.contains_array(p.x, p.y))

    def bbox(self) -> tuple:
        yc, R = self.disc
        x0, x1, y0, y1 = self.center.x - R, self.center.x + R, yc - R, yc + R
        if self.stabilized:
            y1 = self.collar_top
        return x0, x1, y0, y1

    def to_json(self) -> dict:
        out = {"center": self.center.to_json(), "radius": self.radius}
        if self.stabilized:
            out.update(stabilized=True, y_thick=self.y_thick, collar_top=self.collar_top,
                       footprint=list(self.footprint))
        return out


def stabilize_ball(b: CoverSet, y_thick: float, collar_top: float) -> CoverSet:
    """Cut b at the shrunken thick part and extend it along the flow lines."""
    if not y_thick < collar_top:
        raise CoverError("need y_thick < collar_top")
    yc, R = b.disc
    top = b.center.y * math.exp(b.radius)
    if top <= y_thick:
        return b
    half = math.sqrt(max(R * R - (y_thick - yc) ** 2, 0.0))
    return CoverSet(b.center, b.radius, True, y_thick, collar_top,
                    (b.center.x - half, b.center.x + half), b.period)


# --- intersection oracles -------------------------------------------------


def _disc_points(discs):
    """Centers and pairwise circle crossings of Euclidean discs (cx, cy, R)."""
    pts = [(cx, cy) for cx, cy, _ in discs]
    for (x1, y1, r1), (x2, y2, r2) in itertools.combinations(discs, 2):
        d = math.hypot(x2 - x1, y2 - y1)
        if d == 0 or d > r1 + r2 or d < abs(r1 - r2):
            continue
        a = (r1 * r1 - r2 * r2 + d * d) / (2 * d)
        h = math.sqrt(max(r1 * r1 - a * a, 0.0))
        mx, my = x1 + a * (x2 - x1) / d, y1 + a * (y2 - y1) / d
        pts.append((mx + h * (y2 - y1) / d, my - h * (x2 - x1) / d))
        pts.append((mx - h * (y2 - y1) / d, my + h * (x2 - x1) / d))
    return pts


def discs_meet(discs, rel: float = 1e-10) -> bool:
    """Whether open discs (cx, cy, R) have a common point.

    Radii are shrunk by a relative ``rel`` so that tangent discs count as
    disjoint, then the closed-disc criterion is applied.
    """
    if len(discs) == 1:
        return True
    for (x1, y1, r1), (x2, y2, r2) in itertools.combinations(discs, 2):
        if math.hypot(x2 - x1, y2 - y1) >= r1 + r2:
            return False
    shrunk = [(cx, cy, r * (1 - rel)) for cx, cy, r in discs]
    slack = 1e-13 * max(r for _, _, r in discs)
    return any(all(math.hypot(px - cx, py - cy) <= r + slack for cx, cy, r in shrunk)
               for px, py in _disc_points(shrunk))


class BallOracle:
    """Exact intersection tests for hyperbolic balls (optionally in a cyclic quotient)."""

    approximate = False

    def __init__(self, cover: Sequence[CoverSet]):
        self.cover = list(cover)
        if any(c.stabilized for c in self.cover):
            raise CoverError("BallOracle handles plain balls only; use SampledOracle")

    def _discs(self, idx):
        ref = self.cover[idx[0]].center.x
        out = []
        for i in idx:
            c = self.cover[i]
            x = c.center.x
            if c.period is not None:
                x = x - c.period * round((x - ref) / c.period)
            yc, R = c.disc
            out.append((x, yc, R))
        return out

    def __call__(self, idx) -> bool:
        return discs_meet(self._discs(idx))

    def candidate_pairs(self):
        xy = np.array([[c.center.x, c.center.y] for c in self.cover])
        rad = np.array([c.radius for c in self.cover])
        period = self.cover[0].period if self.cover else None
        metric = quotient_metric(period) if period is not None else distance_array
        d = metric(xy[:, None, 0], xy[:, None, 1], xy[None, :, 0], xy[None, :, 1])
        close = d < rad[:, None] + rad[None, :]
        i, j = np.nonzero(np.triu(close, 1))
        return list(zip(i.tolist(), j.tolist()))


class SampledOracle:
    """Approximate k-wise test: any grid point lying in every set."""

    approximate = True

    def __init__(self, cover: Sequence, pitch: float):
        self.cover = list(cover)
        self.pitch = pitch

    def __call__(self, idx) -> bool:
        boxes = np.array([self.cover[i].bbox() for i in idx])
        x0, x1 = boxes[:, 0].max(), boxes[:, 1].min()
        y0, y1 = boxes[:, 2].max(), boxes[:, 3].min()
        if x0 >= x1 or y0 >= y1:
            return False
        step = self.pitch * y0
        xs = np.arange(x0, x1, step) + step / 2
        ys = np.exp(np.arange(math.log(y0), math.log(y1), self.pitch) + self.pitch / 2)
        X, Y = np.meshgrid(xs, ys)
        mask = np.ones(X.shape, dtype=bool)
        for i in idx:
            mask &= self.cover[i].contains_array(X, Y)
            if not mask.any():
                return False
        return True


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def pieces(self):
        return [(self.lo, self.hi)]


@dataclass(frozen=True)
class Arc:
    """Open arc [start, start + length) on a circle of given circumference."""

    start: float
    length: float
    circumference: float = 1.0

    def pieces(self):
        L = self.circumference
        a = self.start % L
        b = a + self.length
        if self.length >= L:
            return [(0.0, L)]
        if b <= L:
            return [(a, b)]
        return [(a, L), (0.0, b - L)]


def _meet_pieces(p, q):
    out = []
    for a0, a1 in p:
        for b0, b1 in q:
            lo, hi = max(a0, b0), min(a1, b1)
            if lo < hi:
                out.append((lo, hi))
    return out


@dataclass(frozen=True)
class ProductPatch:
    """Product of arcs/intervals, e.g. a rectangle on the flat torus."""

    factors: tuple


def exact_oracle(cover: Sequence) -> Callable:
    """Exact common-intersection test for intervals, arcs and their products."""
    def test(idx) -> bool:
        sets = [cover[i] for i in idx]
        if isinstance(sets[0], ProductPatch):
            for f in range(len(sets[0].factors)):
                pieces = sets[0].factors[f].pieces()
                for s in sets[1:]:
                    pieces = _meet_pieces(pieces, s.factors[f].pieces())
                if not pieces:
                    return False
            return True
        pieces = sets[0].pieces()
        for s in sets[1:]:
            pieces = _meet_pieces(pieces, s.pieces())
            if not pieces:
                return False
        return True
    return test


# --- nerve ------------------------------------------------------------------


class NerveComplex(SimplicialComplex):
    """Nerve of a cover; vertex i is cover set i."""

    def __init__(self, simplices, cover_size: int, approximate: bool = False):
        super().__init__(simplices)
        self.cover_size = cover_size
        self.approximate = approximate


def nerve(cover: Sequence, oracle: Callable, dim_cap: int = 4,
          check_monotone: bool = False) -> NerveComplex:
    """All index sets of size <= dim_cap + 1 whose sets share a point.

    Candidates of size k + 1 are only tested when all their k-faces are in
    the nerve.  Pairs are always tested exhaustively (or via the oracle's
    ``candidate_pairs``), and a pair reported as meeting while one of its
    members is empty raises; ``check_monotone`` additionally evaluates every
    subset of size <= dim_cap + 1 and rejects any superset that meets while
    a face does not.
    """
    n = len(cover)
    nonempty = [bool(oracle((i,))) for i in range(n)]
    simplices = [(i,) for i in range(n) if nonempty[i]]
    if dim_cap < 1 or n < 2:
        return NerveComplex(simplices, n, getattr(oracle, "approximate", False))

    if hasattr(oracle, "candidate_pairs"):
        pairs = oracle.candidate_pairs()
    else:
        pairs = list(itertools.combinations(range(n), 2))
    edges = set()
    for i, j in pairs:
        if oracle((i, j)):
            if not (nonempty[i] and nonempty[j]):
                raise CoverError(f"non-monotone oracle: {(i, j)} meets but a member is empty")
            edges.add((i, j))
    nb = {i: set() for i in range(n)}
    for i, j in edges:
        nb[i].add(j)
        nb[j].add(i)
    simplices.extend(sorted(edges))

    layer = sorted(edges)
    present = set(layer)
    for size in range(3, dim_cap + 2):
        nxt = []
        for s in layer:
            common = set.intersection(*(nb[v] for v in s))
            for v in sorted(w for w in common if w > s[-1]):
                t = s + (v,)
                if all(t[:k] + t[k + 1:] in present for k in range(size - 1)) and oracle(t):
                    nxt.append(t)
        present = set(nxt)
        simplices.extend(nxt)
        layer = nxt
        if not layer:
            break

    result = NerveComplex(simplices, n, getattr(oracle, "approximate", False))
    if check_monotone:
        for size in range(2, dim_cap + 2):
            for t in itertools.combinations(range(n), size):
                if t not in result and oracle(t):
                    raise CoverError(f"non-monotone oracle: {t} meets but a face does not")
    return result


# --- budgets and complexity --------------------------------------------------


def refinement_budget(ledger: ConstantsLedger) -> tuple[int, int]:
    return _refinement_budget(ledger.n, ledger.kappa, ledger.lam)


def complexity_constants(ledger: ConstantsLedger):
    return _complexity_constants(ledger)


def _fmt(v):
    if isinstance(v, mpmath.mpf) or (isinstance(v, int) and abs(v) > 1e15):
        return mpmath.nstr(mpmath.mpf(v), 12)
    return v


@dataclass
class DCReport:
    passed: bool
    vertices: int
    vertex_bound: object
    max_degree: int
    degree_bound: object
    counts: list = field(default_factory=list)
    approximate: bool = False

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "vertices": self.vertices, "vertex_bound": _fmt(self.vertex_bound),
            "vertex_ok": self.vertices <= self.vertex_bound,
            "max_degree": self.max_degree, "degree_bound": _fmt(self.degree_bound),
            "degree_ok": self.max_degree <= self.degree_bound,
            "simplex_counts": [{**r, "bound": _fmt(r["bound"])} for r in self.counts],
            "approximate_intersections": self.approximate,
        }


def check_DC(complex: SimplicialComplex, D, C_vol) -> DCReport:
    """Vertex count <= C_vol, vertex degree <= D, and #k-simplices <= D^k C_vol."""
    v = complex.count(0)
    deg = complex.max_degree()
    counts = []
    for k in range(complex.dim + 1):
        bound = mpmath.mpf(D) ** k * mpmath.mpf(C_vol)
        counts.append({"k": k, "count": complex.count(k), "bound": bound,
                       "ok": complex.count(k) <= bound})
    ok = v <= C_vol and deg <= D and all(r["ok"] for r in counts)
    return DCReport(bool(ok), v, C_vol, deg, D, counts,
                    getattr(complex, "approximate", False))


def ball_cover(net: Net, radius: float, period: Optional[float] = None) -> list[CoverSet]:
    return [CoverSet(p, radius, period=period) for p in net.centers]


def thin_sets_meeting(ball: CoverSet, eps: float, delta: float, max_power: int = 10_000) -> int:
    """Number of distinct sets ({d_T^k < eps})_{delta/4} meeting ``ball``, T: z -> z + 1.

    {d_T^k < eps} is the horoball y > k y0 with y0 the thin height of T, and
    its delta/4-neighbourhood is y > k y0 exp(-delta/4); T^k and T^-k give
    the same set.
    """
    y0 = 1.0 / (2.0 * math.sinh(eps / 2.0))
    top = ball.center.y * math.exp(ball.radius)
    return sum(1 for k in range(1, max_power + 1) if top > k * y0 * math.exp(-delta / 4))
