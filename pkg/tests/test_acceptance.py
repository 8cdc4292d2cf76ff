"""The twelve acceptance criteria, each timed and reported as one PASS/FAIL line."""

import contextlib
import itertools
import math
import random
import time

import mpmath
import numpy as np
import pytest
from scipy import integrate

from visbound.constants import N_packing, build_ledger, refinement_budget
from visbound.cover import (
    BallOracle,
    CoverSet,
    Interval,
    check_DC,
    complexity_constants,
    exact_oracle,
    nerve,
    stabilize_ball,
)
from visbound.geometry import UhpPoint
from visbound.homology import SimplicialComplex, bounds_report, homology
from visbound.snf import snf
from visbound.thick_thin import d_Gamma_array, entry_time, flow, thin_boundary_height
from visbound.warped import CuspModel, curvature_array, cusp_volume, visibility_integral

from cli_suite import run_suite
from conftest import GOLDEN, GOLDEN_HOMOLOGY
from test_cover import circle_cover, quotient_model_cover, torus_cover
from test_snf import check_transforms, minor_gcd_diagonal
from test_thick_thin import CONGRUENCE, bisect_height, congruence_domain_points

pytestmark = pytest.mark.acceptance


@contextlib.contextmanager
def criterion(capsys, number, title, limit=None):
    """Run the body, enforce the runtime limit and print one PASS/FAIL line."""
    start = time.perf_counter()
    status, detail = "FAIL", ""
    try:
        yield
        elapsed = time.perf_counter() - start
        detail = f"{elapsed:.2f}s"
        if limit is not None and elapsed >= limit:
            detail += f" exceeds {limit}s"
            raise AssertionError(f"criterion {number} took {elapsed:.2f}s, limit {limit}s")
        status = "PASS"
    except Exception as exc:
        detail = detail or type(exc).__name__
        raise
    finally:
        with capsys.disabled():
            print(f"\n{status} criterion {number}: {title} ({detail})")


def test_criterion_01_curvature(capsys):
    rng = np.random.default_rng(1)
    m = CuspModel()
    with criterion(capsys, 1, "curvature bands", 1.0):
        t = np.concatenate([rng.uniform(0, 1, 3000), rng.uniform(1, 3, 3000),
                            np.exp(rng.uniform(math.log(3), math.log(1e4), 4000))])
        Y = rng.uniform(-1, 1, t.size)
        K = curvature_array(m, t, Y)
        assert t.size == 10_000
        low, mid, high = t <= 1, (t > 1) & (t < 3), t >= 3
        assert np.all(np.abs(K[low] + 1) <= 1e-12)
        assert np.all((K[mid] >= -11) & (K[mid] <= -0.04))
        th = t[high]
        assert np.all((K[high] >= -6 / th ** 2 - 1e-10) & (K[high] <= -4 / th ** 2 + 1e-10))


def test_criterion_02_visibility(capsys):
    m = CuspModel()
    with criterion(capsys, 2, "visibility divergence", 1.0):
        for T in (10.0, 1e2, 1e3, 1e4):
            assert visibility_integral(m, T) >= 0.04 * math.log(T) - 1e-6


def test_criterion_03_volume(capsys):
    with criterion(capsys, 3, "cusp volume", 1.0):
        v = cusp_volume(CuspModel(n=2, torus_volume=1.0), 3.0)
        quad, _ = integrate.quad(lambda t: t ** -2, 3, np.inf, epsabs=1e-13)
        assert abs(v - 1 / 3) <= 1e-9 and abs(quad - 1 / 3) <= 1e-9


def test_criterion_04_thick_thin(capsys):
    with criterion(capsys, 4, "thin height and truncation stability", 5.0):
        for eps in np.linspace(0.01, 1, 22)[1:-1]:
            assert abs(thin_boundary_height(eps) - bisect_height(eps)) <= 1e-9
        xs, ys = congruence_domain_points(100, 3)
        assert xs.size == 100
        a = d_Gamma_array(CONGRUENCE.with_cap(3), xs, ys)
        b = d_Gamma_array(CONGRUENCE.with_cap(4), xs, ys)
        assert np.array_equal(a, b)


def test_criterion_05_flow(capsys):
    rng = np.random.default_rng(5)
    with criterion(capsys, 5, "flow contract", 5.0):
        y_thick = 2.0
        for x, ratio in zip(rng.uniform(-3, 3, 200), np.exp(rng.uniform(1e-6, 5, 200))):
            p = UhpPoint(x, y_thick * ratio)
            assert abs(flow(p, 1.0, y_thick).y - y_thick) <= 1e-10
            t0 = entry_time(p.y, y_thick)
            assert abs(entry_time(p.y + 1e-6, y_thick) - t0) < 1e-5
        top = 10.0
        for cy in (1.6, 2.0, 2.3):
            b = stabilize_ball(CoverSet(UhpPoint(0.0, cy), 0.25), y_thick, top)
            x0, x1, y0, y1 = b.bbox()
            X, Y = rng.uniform(x0, x1, 4000), rng.uniform(y0, y1, 4000)
            inside = b.contains_array(X, Y)
            pts = list(zip(X[inside], Y[inside]))[:100]
            assert len(pts) == 100
            for x, y in pts:
                for s in np.linspace(0, 1, 10):
                    assert b.contains(flow(UhpPoint(x, y), s, y_thick, top))


def test_criterion_06_ledger(capsys):
    with criterion(capsys, 6, "constants ledger identities", 1.0):
        for n in (2, 3, 4):
            led = build_ledger(n, 0.32)
            assert led.eps == led.margulis_eps / 4 and led.delta == led.margulis_eps / 8
            assert led.r == led.delta / 4 and led.rho == min(led.eps / 2, led.delta / 4)
            assert led.kappa == N_packing(n, led.eps, led.margulis_eps)
            assert led.lam == N_packing(n, led.r / 2, 2 * led.r)
            nu0 = 3 ** n * (4 * led.kappa + 1) ** (n * led.kappa)
            assert (led.nu0, led.nu) == (nu0, led.lam * 2 ** led.lam * nu0)
            assert refinement_budget(n, led.kappa, led.lam) == (led.nu0, led.nu)
            D, C = mpmath.mpf(led.D_degree), led.C_cover
            for k in range(n + 1):
                assert led.E_of_k(k) == (D ** (k - 1) + D ** k + 1) * C


def test_criterion_07_snf(capsys):
    rng = random.Random(7)
    with criterion(capsys, 7, "Smith normal form engine", 30.0):
        for _ in range(500):
            m, n = rng.randint(1, 8), rng.randint(1, 8)
            A = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
            check_transforms(A, snf(A, transforms=True))
        # exhaustive small-entry instances up to 2 x 2, then all 3 x 3 with entries in {-1, 0, 1}
        for shape, vals in (((1, 1), range(-9, 10)), ((1, 2), range(-3, 4)), ((2, 1), range(-3, 4)),
                            ((2, 2), range(-2, 3)), ((3, 3), range(-1, 2))):
            for flat in itertools.product(vals, repeat=shape[0] * shape[1]):
                A = [list(flat[i * shape[1]:(i + 1) * shape[1]]) for i in range(shape[0])]
                assert list(snf(A).diagonal) == minor_gcd_diagonal(A)
        # random 3 x 4 and 4 x 4 instances with wider entries
        for _ in range(300):
            m, n = rng.choice([(3, 4), (4, 3), (4, 4)])
            A = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(m)]
            assert list(snf(A).diagonal) == minor_gcd_diagonal(A)


def test_criterion_08_golden_homology(capsys):
    with criterion(capsys, 8, "golden homology", 5.0):
        for name, simplices in GOLDEN.items():
            h = homology(SimplicialComplex(simplices), primes=(2,))
            betti, torsion, mod2 = GOLDEN_HOMOLOGY[name]
            assert h.betti() == betti
            assert [d.torsion for d in h.degrees] == torsion
            assert [d.betti_mod_p[2] for d in h.degrees] == mod2


def test_criterion_09_nerve_vs_truth(capsys):
    with criterion(capsys, 9, "nerve homology matches the covered space", 10.0):
        seg = [Interval(i / 10, i / 10 + 0.15) for i in range(10)]
        assert homology(nerve(seg, exact_oracle(seg))).betti() == [1, 0]
        for k in range(3, 7):
            cov = circle_cover(k)
            assert homology(nerve(cov, exact_oracle(cov))).betti() == [1, 1]
        cov = torus_cover()
        assert homology(nerve(cov, exact_oracle(cov))).betti()[:3] == [1, 2, 1]


def test_criterion_10_dc_verification(capsys):
    led = build_ledger(2, 0.32)
    with criterion(capsys, 10, "(D, C) verification in the cyclic-parabolic quotient", 30.0):
        net, cover, area, _ = quotient_model_cover(led, band=1.05)
        nc = nerve(cover, BallOracle(cover), dim_cap=3)
        assert nc.max_degree() <= N_packing(2, led.r / 2, 2 * led.r)
        C, D = complexity_constants(led)
        rep = check_DC(nc, D, C * area)
        assert rep.passed
        assert nc.count(0) <= C * area
        assert all(row["ok"] for row in rep.to_json()["simplex_counts"])


def test_criterion_11_bounds_report(capsys):
    # the level-2 congruence group has index 6 in PSL(2, Z): fundamental-domain area 6 (pi / 3)
    vol = 2 * math.pi
    with criterion(capsys, 11, "bounds report on golden complexes", 5.0):
        led2 = build_ledger(2, 0.32)
        led3 = build_ledger(3, 0.32)
        for simplices in GOLDEN.values():
            h = homology(SimplicialComplex(simplices), primes=(2, 3))
            assert bounds_report(h, led2, vol).passed
            rep3 = bounds_report(h, led3, vol)
            if len(h.degrees) > 1:
                row = rep3.rows[1]
                assert row["torsion_ok"] is None and row["note"]
            assert rep3.passed


def test_criterion_12_determinism(capsys, tmp_path):
    with criterion(capsys, 12, "byte-identical CLI artifacts"):
        a, b = tmp_path / "a", tmp_path / "b"
        a.mkdir(), b.mkdir()
        first = run_suite(a, seed=12, subprocesses=True)
        second = run_suite(b, seed=12, subprocesses=True)
        assert len(first) >= 10
        assert first == second
