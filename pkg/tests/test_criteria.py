import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loewner_qc import criteria as C
from loewner_qc import extension as E
from loewner_qc.errors import DomainError, EvaluationError, SingularityError

# mpmath, 30 digits
K_STAR = 0.188856464740230788
Q_TENTH = 0.493960071783900204


def quad(c):
    return C.polynomial_sample([c], f"z+{c}z^2")


def test_threshold():
    assert C.threshold_k_star() == pytest.approx(K_STAR, abs=1e-15)
    assert C.q_of_k(K_STAR) == pytest.approx(1.0, abs=1e-14)
    assert C.q_of_k(0.1) == pytest.approx(Q_TENTH, rel=1e-14)


@given(st.floats(0.0, 0.2))
def test_q_monotone(k):
    assert (C.q_of_k(k) < 1) == (k < K_STAR) or abs(k - K_STAR) < 1e-12


def test_disk_grid():
    g = C.disk_grid(5, 8)
    assert g.size == 1 + 4 * 8
    assert g[0] == 0
    assert np.abs(g).max() == pytest.approx(C.DISK_EDGE)


def test_sample_normalization():
    assert C.polynomial_sample([0.3, 0.1j]).normalization_error() == 0
    assert C.koebe_sample().a2 == pytest.approx(2)


def test_schwarzian_matches_fd():
    f = C.polynomial_sample([0.1, -0.05j])
    z = C.disk_grid(6, 8, 0.8)
    assert np.max(np.abs(f.schwarzian(z) - f.schwarzian_fd(z))) <= 1e-9


def test_schwarzian_of_mobius_vanishes():
    f = C.AnalyticSample(lambda z: z / (1 + z / 3), lambda z: 1 / (1 + z / 3) ** 2,
                         lambda z: -2 / 3 / (1 + z / 3) ** 3, lambda z: 2 / 3 / (1 + z / 3) ** 4)
    z = C.disk_grid(6, 8)
    assert np.max(np.abs(f.schwarzian(z))) <= 1e-12


def test_derivative_check_exact():
    # |f' - 1| = 2c|z| peaks at the grid's outer radius
    r = C.check_derivative(quad(0.05), 0.2)
    assert r.ok
    assert r.margin == pytest.approx(0.2 - 0.1 * C.DISK_EDGE, abs=1e-15)
    assert abs(r.worst_point) == pytest.approx(C.DISK_EDGE)


def test_pre_schwarzian_check():
    r = C.check_pre_schwarzian(quad(0.05), 0.2)
    assert r.ok
    # (1 - |z|^2) 0.1 / |1 + 0.1 z| is largest on the negative real axis
    s = np.linspace(0, 1, 100001)
    exact = np.max((1 - s * s) * 0.1 / (1 - 0.1 * s))
    assert 0.2 - r.margin == pytest.approx(exact, abs=1e-4)


def test_aw_check_polynomial_and_koebe():
    r = C.check_aw_becker(quad(0.05), 0.5)
    assert r.ok and 0 < r.margin < 0.5
    assert not C.check_aw_becker(C.koebe_sample(), 0.9).ok


def test_non_finite_grid_raises():
    f = C.AnalyticSample(lambda z: z, lambda z: 1 / (z - 0.5), lambda z: z, None)
    with pytest.raises(EvaluationError):
        C.check_derivative(f, 0.5, [0.5, 0.1])


def test_check_result_json():
    r = C.CheckResult("derivative", True, 0.25, 0.5 - 0.5j)
    out = json.loads(C.report_json([r]))
    assert out == [{"condition": "derivative", "ok": True, "margin": 0.25, "worst_point": [0.5, -0.5]}]


# -- PDE route -------------------------------------------------------------------------


def test_example2_conditions():
    rep = C.check_pde_conditions(C.example2_spec(quad(0.05), 0.1))
    assert rep.ok
    assert rep.cond_ii_max == pytest.approx(0.1 * C.OPEN_DISK_EDGE, abs=1e-15)
    assert rep.diagonal_error <= 1e-15
    assert rep.growth_max_ratio <= 10


def test_example2_fails_below_coefficient():
    rep = C.check_pde_conditions(C.example2_spec(quad(0.05), 0.09))
    assert not rep.ok


def test_example2_extension_closed_form():
    spec = C.example2_spec(quad(0.05), 0.1)
    z = E.annulus_grid(1.05, 4.0, 6)
    assert np.allclose(C.pde_extend(spec, z), z + 0.05 / np.conj(z) ** 2, atol=1e-15)
    rep = E.numeric_dilatation(lambda w: C.pde_extend(spec, w), z,
                               analytic=lambda w: -0.1 / np.conj(w) ** 3)
    assert rep.max_deviation <= 1e-8
    assert rep.sup_dilatation <= 0.1


def test_example1_conditions():
    f = quad(0.02)
    rep = C.check_pde_conditions(C.example1_spec(f, 0.2))
    w, r = rep.cond_ii_point
    direct = r * abs((w / r - w) * f.fpp(w) / f.fp(w))
    assert rep.cond_ii_max == pytest.approx(direct, rel=1e-14)
    assert rep.cond_i


def test_pde_diagonal_violation():
    spec = C.example2_spec(quad(0.05), 0.1)
    bad = C.PDEExtensionSpec(lambda z, w: spec.Phi(z, w) + 1e-6, spec.phi, 0.5, 10.0, 0.1, spec.f)
    assert not C.check_pde_conditions(bad).cond_i


def test_pde_spec_validation():
    with pytest.raises(ValueError):
        C.PDEExtensionSpec(lambda z, w: z, lambda z, w: z, 1.5, 1.0, 0.1)
    with pytest.raises(DomainError):
        C.pde_extend(C.example2_spec(quad(0.05), 0.1), 0.5)


def test_aw_spec_diagonal_and_conditions():
    f = quad(0.05)
    spec = C.aw_becker_spec(f, 0.5)
    z = C.disk_grid(10, 16, 0.99)
    assert np.max(np.abs(spec.Phi(z, z) - f.f(z))) <= 1e-15
    rep = C.check_pde_conditions(spec)
    assert rep.cond_i


def test_aw_extension_is_quasiconformal():
    f = quad(0.05)
    k = 0.5
    assert C.check_aw_becker(f, k).ok
    z = E.annulus_grid(1.05, 4.0, 8)
    rep = E.numeric_dilatation(lambda w: C.aw_becker_extend(f, w), z)
    assert rep.sup_dilatation <= k


def test_aw_extension_continuous_on_circle():
    f = quad(0.05)
    e = np.exp(1j * np.linspace(0.1, 6.0, 9))
    assert np.allclose(C.aw_becker_extend(f, e * (1 + 1e-9)), f.f(e), atol=1e-7)


def test_aw_extension_singularity():
    # a_2 = 1 but f'' = 0 off the origin, so the denominator is 1 + (z - w), which
    # vanishes on the real axis where z - 1/z = -1
    f = C.AnalyticSample(lambda z: z, lambda z: 1 + 0 * z,
                         lambda z: np.where(z == 0, 2.0, 0.0) + 0 * z, None)
    assert np.isfinite(C.aw_becker_extend(f, 2.0))
    with pytest.raises(SingularityError):
        C.aw_becker_extend(f, -(1 + math.sqrt(5)) / 2)
