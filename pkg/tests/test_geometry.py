import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy import optimize

from visbound.geometry import (
    INFINITY,
    BoundaryPoint,
    GeodesicRay,
    GeometryError,
    Horoball,
    I,
    IsometryType,
    MoebiusIsometry,
    UhpPoint,
    apply,
    axis_endpoints,
    busemann,
    classify,
    displacement,
    displacement_array,
    distance,
    distance_array,
    fixed_points,
    horoball_contains,
    translation_length,
)

from conftest import isometries, points

T1 = MoebiusIsometry.translation(1.0)
D4 = MoebiusIsometry.dilation(4.0)  # z -> 4z


def acosh_distance(p, q):
    """Oracle: cosh d = 1 + |p - q|^2 / (2 y_p y_q)."""
    return math.acosh(1 + ((p.x - q.x) ** 2 + (p.y - q.y) ** 2) / (2 * p.y * q.y))


def min_displacement(g):
    """Oracle: numeric minimum of the displacement over (x, ln y)."""
    f = lambda v: displacement(g, UhpPoint(v[0], math.exp(v[1])))
    best = min((optimize.minimize(f, x0, method="Nelder-Mead",
                                  options=dict(xatol=1e-12, fatol=1e-14, maxiter=4000))
                for x0 in ([0.0, 0.0], [1.0, 1.0], [-1.0, -1.0])), key=lambda r: r.fun)
    return best.fun


# --- points and isometries ------------------------------------------------------


def test_point_rejects_lower_half_plane():
    with pytest.raises(GeometryError):
        UhpPoint(0.0, 0.0)
    with pytest.raises(GeometryError):
        UhpPoint(1.0, -2.0)


def test_isometry_rejects_bad_determinant():
    with pytest.raises(GeometryError):
        MoebiusIsometry(1.0, 1.0, 1.0, 1.0)


def test_normalized_rescales_and_fixes_sign():
    g = MoebiusIsometry.normalized(-2.0, 0.0, 0.0, -2.0)
    assert g.is_identity()
    h = MoebiusIsometry.normalized(4.0, 0.0, 0.0, 1.0)
    assert h.a == pytest.approx(2.0) and h.d == pytest.approx(0.5)


@given(isometries())
def test_inverse_composes_to_identity(g):
    assert (g @ g.inverse()).is_identity(1e-8)


# --- distance ------------------------------------------------------------------------


@pytest.mark.parametrize("p, q, expected", [
    (I, I, 0.0),
    (I, UhpPoint(0, 2), math.log(2)),
    (I, UhpPoint(1, 1), math.acosh(1.5)),
])
def test_distance_examples(p, q, expected):
    assert distance(p, q) == pytest.approx(expected, abs=1e-14)
    assert distance(p, q) == pytest.approx(acosh_distance(p, q), abs=1e-12)


@given(points, points)
def test_distance_matches_acosh_oracle(p, q):
    assert distance(p, q) == pytest.approx(acosh_distance(p, q), rel=1e-9, abs=1e-7)


@given(points, points, points)
def test_distance_is_a_metric(p, q, r):
    assert distance(p, q) == distance(q, p)
    assert distance(p, q) >= 0
    assert distance(p, r) <= distance(p, q) + distance(q, r) + 1e-9


def test_distance_zero_only_on_diagonal():
    assert distance(UhpPoint(0.3, 2.0), UhpPoint(0.3, 2.0)) == 0
    assert distance(UhpPoint(0.3, 2.0), UhpPoint(0.3 + 1e-9, 2.0)) > 0


@given(points, points)
def test_distance_array_agrees(p, q):
    assert float(distance_array(p.x, p.y, q.x, q.y)) == pytest.approx(distance(p, q), abs=1e-12)


# --- action ---------------------------------------------------------------------------


def test_apply_examples():
    assert apply(MoebiusIsometry.identity(), I) == I
    w = apply(T1, I)
    assert (w.x, w.y) == pytest.approx((1.0, 1.0))
    w = apply(MoebiusIsometry(2.0, 0.0, 0.0, 0.5), I)
    assert (w.x, w.y) == pytest.approx((0.0, 4.0))


@given(isometries(), points, points)
def test_isometry_property(g, p, q):
    assert distance(apply(g, p), apply(g, q)) == pytest.approx(distance(p, q), abs=1e-10, rel=1e-10)


@given(isometries(), points)
def test_displacement_invariant_under_matrix_negation(g, p):
    neg = MoebiusIsometry.from_matrix(-g.matrix)
    assert displacement(neg, p) == pytest.approx(displacement(g, p), abs=1e-12)


@given(isometries(), isometries(), points)
def test_conjugation_equivariance(g, h, p):
    lhs = displacement(g.conjugate_by(h), apply(h, p))
    assert lhs == pytest.approx(displacement(g, p), abs=1e-10, rel=1e-9)


@given(isometries(), points)
def test_displacement_array_agrees(g, p):
    assert float(displacement_array(g, p.x, p.y)) == pytest.approx(displacement(g, p), abs=1e-10)


def test_displacement_examples():
    assert displacement(MoebiusIsometry.identity(), UhpPoint(3, 7)) == 0
    assert displacement(T1, I) == pytest.approx(math.acosh(1.5), abs=1e-14)
    assert displacement(D4, I) == pytest.approx(math.log(4), abs=1e-14)
    assert math.acosh(17 / 8) == pytest.approx(math.log(4), abs=1e-14)


# --- classification ----------------------------------------------------------------


def test_classify_examples():
    assert classify(T1) is IsometryType.PARABOLIC
    assert classify(MoebiusIsometry(2.0, 0.0, 0.0, 0.5)) is IsometryType.HYPERBOLIC
    assert classify(MoebiusIsometry.identity()) is IsometryType.IDENTITY
    rot = MoebiusIsometry(math.cos(0.3), -math.sin(0.3), math.sin(0.3), math.cos(0.3))
    assert classify(rot) is IsometryType.ELLIPTIC


def test_parabolic_has_no_minimum():
    # displacement along iy decreases to 0 and never reaches it
    ys = np.logspace(0, 6, 50)
    d = displacement_array(T1, 0.0, ys)
    assert np.all(np.diff(d) < 0) and d[-1] > 0 and d[-1] < 1e-5


def test_hyperbolic_minimum_by_grid_search():
    g = MoebiusIsometry(2.0, 0.0, 0.0, 0.5)
    X, Y = np.meshgrid(np.linspace(-2, 2, 201), np.exp(np.linspace(-2, 2, 201)))
    d = displacement_array(g, X, Y)
    i = np.unravel_index(np.argmin(d), d.shape)
    assert abs(X[i]) < 1e-12
    assert d[i] == pytest.approx(2 * math.log(2), abs=1e-12)


@given(isometries(), st.integers(1, 5))
def test_classification_stable_under_powers(g, k):
    # random draws are almost never parabolic; those are covered below
    assume(classify(g) is IsometryType.HYPERBOLIC)
    assert classify(g ** k) is IsometryType.HYPERBOLIC


def test_powers_of_parabolic_stay_parabolic():
    g = T1.conjugate_by(MoebiusIsometry.normalized(1.0, 2.0, 0.5, 2.0))
    for k in range(1, 6):
        assert classify(g ** k) is IsometryType.PARABOLIC


def test_parabolic_monotone_along_vertical_ray():
    ts = np.linspace(-5, 10, 100)
    d = displacement_array(MoebiusIsometry.translation(0.7), 0.0, np.exp(ts))
    assert np.all(np.diff(d) < 0)


def test_hyperbolic_monotone_away_from_axis():
    g = MoebiusIsometry.dilation(3.0)
    # unit-speed geodesic leaving the imaginary axis perpendicularly at i
    rho = np.linspace(0, 8, 200)
    d = displacement_array(g, np.tanh(rho), 1 / np.cosh(rho))
    assert np.all(np.diff(d) > 0)


# --- translation length and fixed points ----------------------------------------------


@pytest.mark.parametrize("g, expected", [
    (MoebiusIsometry(2.0, 0.0, 0.0, 0.5), 2 * math.log(2)),
    (MoebiusIsometry(math.exp(0.5), 0.0, 0.0, math.exp(-0.5)), 1.0),
])
def test_translation_length_examples(g, expected):
    assert translation_length(g) == pytest.approx(expected, abs=1e-12)
    assert min_displacement(g) == pytest.approx(expected, abs=1e-8)


@given(isometries())
def test_translation_length_is_min_displacement(g):
    assume(abs(g.trace) > 2.2 and abs(g.trace) < 8)
    assert translation_length(g) == pytest.approx(min_displacement(g), abs=1e-7)


def test_translation_length_rejects_parabolic():
    with pytest.raises(GeometryError, match="no axis"):
        translation_length(T1)


def test_fixed_points_examples():
    assert fixed_points(T1) == [INFINITY]
    fp = fixed_points(D4)
    assert fp[1] == INFINITY and fp[0].value == pytest.approx(0.0, abs=1e-15)
    roots = [p.value for p in fixed_points(MoebiusIsometry(2.0, 1.0, 1.0, 1.0))]
    assert roots == pytest.approx(sorted(np.roots([1, -1, -1]).real), abs=1e-12)
    with pytest.raises(GeometryError):
        fixed_points(MoebiusIsometry.identity())


@given(isometries())
def test_fixed_points_are_fixed(g):
    kind = classify(g)
    assume(kind is IsometryType.HYPERBOLIC and abs(g.trace) > 2.01)
    fp = fixed_points(g)
    assert len(fp) == 2 and fp[0] != fp[1]
    for z in fp:
        w = g.act_boundary(z)
        if z.is_infinite:
            assert w.is_infinite
        else:
            assert not w.is_infinite and w.value == pytest.approx(z.value, abs=1e-10 * max(1, abs(z.value)))


def test_fixed_points_small_lower_left_entry():
    # nearly upper triangular: the naive quadratic formula loses ~6 digits here
    g = MoebiusIsometry(2.0, -1.0, -1e-10, 0.50000000005)
    for z in fixed_points(g):
        assert g.act_boundary(z).value == pytest.approx(z.value, rel=1e-12)


def test_axis_endpoints_orientation():
    rep, att = axis_endpoints(D4)
    assert att.is_infinite and rep.value == pytest.approx(0.0, abs=1e-15)
    rep, att = axis_endpoints(D4.inverse())
    assert rep.is_infinite


# --- Busemann functions and horoballs -------------------------------------------------


def busemann_limit(z, base, p, t=30.0):
    """Oracle: d(p, c(t)) - t along the ray from base to z."""
    c = GeodesicRay(base, z)(t)
    return acosh_distance(p, c) - t


def test_busemann_examples():
    assert busemann(INFINITY, I, I) == 0
    assert busemann(INFINITY, I, UhpPoint(0, 2)) == pytest.approx(-math.log(2), abs=1e-15)
    assert busemann_limit(INFINITY, I, UhpPoint(0, 2)) == pytest.approx(-math.log(2), abs=1e-9)
    for x in (-3.0, 0.5, 7.0):
        assert busemann(INFINITY, I, UhpPoint(x, 1)) == 0
        assert busemann_limit(INFINITY, I, UhpPoint(x, 1), t=35.0) == pytest.approx(0, abs=1e-9)


@given(st.floats(-3, 3), points, points)
def test_busemann_finite_center_matches_limit(xi, base, p):
    z = BoundaryPoint(xi)
    # the ray leaves floating-point range quickly, so compare at moderate t
    assume(distance(base, p) < 6)
    assert busemann(z, base, p) == pytest.approx(busemann_limit(z, base, p, t=12.0), abs=1e-6)


@given(st.one_of(st.just(INFINITY), st.builds(BoundaryPoint, st.floats(-3, 3))), points, points, points)
def test_busemann_is_one_lipschitz(z, base, p, q):
    assert abs(busemann(z, base, p) - busemann(z, base, q)) <= distance(p, q) + 1e-9
    assert busemann(z, base, base) == pytest.approx(0, abs=1e-12)


def test_horoball_examples():
    hb = Horoball(INFINITY, -math.log(2))
    assert horoball_contains(hb, UhpPoint(0, 3))
    assert not horoball_contains(hb, UhpPoint(0, 2))
    assert not Horoball(INFINITY, 0.0).contains(UhpPoint(0, 0.5))
