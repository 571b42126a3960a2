"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test logs one ``PASS``/``FAIL`` line, collected in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from loewner_qc import criteria as C
from loewner_qc import drivers as D
from loewner_qc import extension as E
from loewner_qc import extremal as X
from loewner_qc import loewner as L

K_GRID = np.geomspace(1e-2, 1 - 1e-2, 200)


@pytest.fixture
def criterion(acceptance_log):
    def check(n, name, ok, detail, elapsed, budget):
        in_time = elapsed < budget
        verdict = "PASS" if ok and in_time else "FAIL"
        acceptance_log(f"criterion {n}: {verdict}  {name}: {detail}; {elapsed:.2f}s (< {budget}s)")
        assert ok, detail
        assert in_time, f"took {elapsed:.2f}s, budget {budget}s"

    return check


def test_criterion_01_sharp_a3(criterion):
    t = time.perf_counter()
    worst = 0.0
    for k in (0.1, 0.2, 0.3, 0.5, 0.7, 0.9):
        a3 = L.coefficient_flow(D.extremal_a3(k), 3)[1]
        worst = max(worst, abs(a3 - k * (1 + math.exp(1 - 1 / k) * (1 + k))))
    criterion(1, "sharp a3 from the extremal flow", worst <= 1e-6, f"max error {worst:.2e}",
              time.perf_counter() - t, 10)


def test_criterion_02_sharp_bound_exceeds_k(criterion):
    t = time.perf_counter()
    # the excess itself, since k + excess rounds to k below k ~ 0.027
    excess = np.array([X.sharp_a3_excess(k) for k in K_GRID])
    ok = bool(np.all(excess > 0))
    criterion(2, "sharp bound > k on 200 k", ok, f"min excess {excess.min():.3e} at k={K_GRID[0]:.3g}",
              time.perf_counter() - t, 1)


def test_criterion_03_fekete_szego_ordering(criterion):
    t = time.perf_counter()
    alpha = (np.arange(10**6) + 0.5) / 10**6
    e = np.exp(-2 * alpha / (1 - alpha))
    order_ok = True
    worst = 0.0
    for k in K_GRID:
        fs = X.fekete_szego_bound(k)[0]
        brute = float(np.min((1 + 2 * e) * k + 4 * alpha * k * k))
        worst = max(worst, abs(fs - brute))
        order_ok &= X.sharp_a3_bound(k) < fs
    criterion(3, "sharp < Fekete-Szego, scan agreement", order_ok and worst <= 1e-8,
              f"ordered={order_ok}, max |fs - brute| {worst:.2e}", time.perf_counter() - t, 30)


def test_criterion_04_constant_power_coefficients(criterion):
    t = time.perf_counter()
    worst = 0.0
    for k in (0.3, 0.7):
        for theta in (0.0, 1.0):
            a = L.coefficient_flow(D.constant_power(k, theta, 1), 6)
            m = np.arange(2, 7)
            worst = max(worst, float(np.max(np.abs(a - m * k ** (m - 1) * np.exp(-1j * (m - 1) * theta)))))
    criterion(4, "closed-form map coefficients", worst <= 1e-6, f"max error {worst:.2e}",
              time.perf_counter() - t, 10)


def test_criterion_05_beltrami_consistency(criterion):
    t = time.perf_counter()
    grid = E.annulus_grid(1.05, 4.0, 40)
    ext = D.extremal_a3(0.5)
    bla = D.blaschke(0.5, 0.7, [0.3, -0.2j])
    r_ext = E.numeric_dilatation(E.extension_map(ext), grid, h=1e-5,
                                 analytic=lambda z: E.extremal_beltrami(0.5, z))
    r_bla = E.numeric_dilatation(E.extension_map(bla), grid, h=1e-5,
                                 analytic=lambda z: E.blaschke_beltrami(bla, z))
    modulus = float(np.max(np.abs(np.abs(E.blaschke_beltrami(bla, grid)) - 0.5)))
    ok = (r_ext.max_deviation <= 1e-3 and r_bla.max_deviation <= 1e-3 and modulus <= 1e-10
          and not r_ext.failure_points and not r_bla.failure_points)
    detail = (f"extremal dev {r_ext.max_deviation:.2e}, blaschke dev {r_bla.max_deviation:.2e}, "
              f"||mu|-k| {modulus:.2e}")
    criterion(5, "numeric vs analytic Beltrami", ok, detail, time.perf_counter() - t, 60)


def test_criterion_06_renormalized_blaschke(criterion):
    t = time.perf_counter()
    d = D.blaschke(0.5, 0.0, [0.4])
    nd = D.normalize_driver(d)
    ts = np.linspace(0.0, 6.0, 13)
    sup = max(D.becker_sup(nd, s) for s in ts)
    rng = np.random.default_rng(20)
    z = 0.9 * np.sqrt(rng.uniform(0, 1, 20)) * np.exp(2j * np.pi * rng.uniform(0, 1, 20))
    diff = float(np.max(np.abs(L.map_limit(nd, z) - L.map_limit(d, z))))
    ok = sup <= D.kappa(0.5) + 1e-6 and diff <= 1e-6
    criterion(6, "renormalized driver bound and map", ok,
              f"becker_sup {sup:.6f} (kappa {D.kappa(0.5):.6f}), map diff {diff:.2e}",
              time.perf_counter() - t, 30)


def test_criterion_07_max_principle(criterion):
    t = time.perf_counter()
    c = X.synthesize_control(0.5)
    ts = np.linspace(0.1, 4 * c.t0, 8)
    rep = X.verify_max_principle(0.5, ts, 64, 64, 32)
    criterion(7, "maximum principle on 64x64x32 grid", rep.gap <= 1e-3,
              f"gap {rep.gap:.2e}, max distance {rep.max_distance:.3f}", time.perf_counter() - t, 60)


def test_criterion_08_hamilton_krushkal(criterion):
    t = time.perf_counter()
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(10):
        k = float(rng.uniform(0.1, 0.9))
        M = int(rng.integers(3, 9))
        c = rng.normal(size=M - 2) + 1j * rng.normal(size=M - 2)
        c = c / X.laurent_l1_norm(c)
        worst = max(worst, abs(X.hk_lambda_closed_form(k, c) - X.hk_lambda_quadrature(k, c)))
    top = 0.0
    for k in (0.2, 0.5, 0.8):
        for m in range(3, 13):
            c = np.zeros(m - 2)
            c[-1] = 1.0
            top = max(top, abs(X.hk_lambda(k, c, normalize=True)))
    ok = worst <= 1e-4 and top < 0.999
    criterion(8, "Hamilton-Krushkal functional", ok,
              f"closed vs quadrature {worst:.2e}, max monomial |Lambda| {top:.5f}",
              time.perf_counter() - t, 60)


def test_criterion_09_threshold(criterion):
    t = time.perf_counter()
    k = C.threshold_k_star()
    criterion(9, "threshold k*", abs(k - 0.188856) <= 1e-6, f"k* = {k:.9f}", time.perf_counter() - t, 1)


def test_criterion_10_spiral(criterion):
    t = time.perf_counter()
    rng = np.random.default_rng(10)
    z = 0.99 * np.sqrt(rng.uniform(1e-4, 1, 200)) * np.exp(2j * np.pi * rng.uniform(0, 1, 200))
    ident = E.spiral_identity_error(z)
    rep = E.numeric_dilatation(E.betker_extension, E.annulus_grid(1.05, 4.0, 40))
    bound = 1 / math.sqrt(2)
    ok = ident <= 1e-10 and rep.sup_dilatation <= bound + 1e-3
    criterion(10, "spiral identity and Betker dilatation", ok,
              f"identity {ident:.2e}, sup |mu| {rep.sup_dilatation:.8f}", time.perf_counter() - t, 30)


def test_criterion_11_pde_round_trip(criterion):
    t = time.perf_counter()
    f = C.polynomial_sample([0.05], "w + 0.05 w^2")
    spec = C.example2_spec(f, 0.1)
    rep = C.check_pde_conditions(spec)
    qc = E.numeric_dilatation(lambda z: C.pde_extend(spec, z), E.annulus_grid(1.05, 4.0, 40))
    ok = rep.ok and qc.sup_dilatation <= 0.1 + 1e-3
    criterion(11, "PDE criterion round trip", ok,
              f"cond_ii {rep.cond_ii_max:.10f}, growth {rep.growth_max_ratio:.3f}, "
              f"sup |mu| {qc.sup_dilatation:.4f}", time.perf_counter() - t, 30)
