import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loewner_qc import drivers as D
from loewner_qc.errors import DomainError, RangeError, SingularityError

ks = st.floats(0.05, 0.95)
ts = st.floats(0.0, 6.0)
disk_points = st.builds(
    lambda r, th: r * cmath.exp(1j * th), st.floats(0.0, 0.95), st.floats(0, 2 * math.pi)
)


def builtin_drivers():
    cp = st.builds(D.constant_power, ks, st.floats(0, 2 * math.pi), st.integers(1, 4))
    ex = st.builds(D.extremal_a3, ks, st.sampled_from([1, -1]))
    bl = st.builds(D.blaschke, ks, st.floats(0, 2 * math.pi), st.lists(disk_points, min_size=1, max_size=3))
    return st.one_of(cp, ex, bl)


# -- evaluation -------------------------------------------------------------------------


def test_constant_power_is_one_at_origin():
    assert D.eval_driver(D.constant_power(0.5, 0, 2), 0, 7.3) == 1


def test_extremal_after_switch():
    d = D.extremal_a3(0.5)
    assert d.t0 == pytest.approx(0.5)
    assert D.eval_driver(d, 0.3, 0.7) == pytest.approx(0.85 / 1.15, abs=1e-15)


def test_blaschke_zero_gives_one():
    assert D.eval_driver(D.blaschke(0.5, 0, [0.4]), 0.4, 0.0) == pytest.approx(1.0)


def test_extremal_continuous_at_switch():
    d = D.extremal_a3(0.3)
    z = np.array([0.2, -0.5j, 0.9 * np.exp(1j)])
    assert np.allclose(d(z, d.t0 - 1e-12), d(z, d.t0), atol=1e-10)


def test_vectorised_in_time():
    d = D.extremal_a3(0.5)
    z = np.array([0.3, 0.3])
    assert np.allclose(d(z, np.array([0.1, 0.9])), [d(0.3, 0.1), d(0.3, 0.9)])


def test_domain_errors():
    d = D.constant_power(0.5)
    with pytest.raises(DomainError):
        D.eval_driver(d, 1.5, 0.0)
    with pytest.raises(DomainError):
        D.eval_driver(d, 0.5, -1.0)


def test_singularity_on_boundary():
    d = D.custom(lambda z, t: (1 + z) / (1 - z), 0.99, True)
    with pytest.raises(SingularityError) as info:
        D.eval_driver(d, 1.0, 0.0)
    assert info.value.location is not None


def test_constructor_validation():
    with pytest.raises(RangeError):
        D.constant_power(1.0)
    with pytest.raises(DomainError):
        D.blaschke(0.5, 0, [1.2])
    with pytest.raises(ValueError):
        D.blaschke(0.5, 0, [])


def test_normalized_flags():
    assert D.constant_power(0.4, 1, 3).normalized
    assert D.extremal_a3(0.4).normalized
    assert D.blaschke(0.4, 0, [0, 0.3]).normalized
    assert not D.blaschke(0.4, 0, [0.3]).normalized


@given(builtin_drivers(), ts)
def test_origin_value(d, t):
    if d.family in (D.Family.CONSTANT_POWER, D.Family.EXTREMAL_A3):
        assert d.origin(t) == 1
    elif d.normalized:
        assert abs(d.origin(t) - 1) < 1e-15


def test_blaschke_nonzero_zeros_is_not_normalized_witness():
    d = D.blaschke(0.5, 0.3, [0.3, -0.2j])
    assert max(abs(d.origin(t) - 1) for t in np.linspace(0, 3, 7)) > 1e-2


@given(builtin_drivers(), ts, disk_points)
def test_positive_real_part(d, t, z):
    assert d(z, t).real > 0


# -- Becker bound ----------------------------------------------------------------------


def _dense_sup(d, t):
    z = (1 - 1e-9) * np.exp(2j * np.pi * np.arange(1 << 16) / (1 << 16))
    return float(np.max(np.abs(D.CayleyData.H(d(z, t)))))


@pytest.mark.parametrize(
    "d, t, m",
    [
        (D.constant_power(0.3, 0, 1), 0.0, 256),
        (D.blaschke(0.5, 1.1, [0.2, -0.3j]), 0.7, 512),
        (D.extremal_a3(0.5), 10.0, 256),
    ],
)
def test_becker_sup_examples(d, t, m):
    s = D.becker_sup(d, t, m)
    assert s == pytest.approx(d.k, abs=1e-6)
    assert s == pytest.approx(_dense_sup(d, t), abs=1e-8)


def test_becker_sup_needs_samples():
    with pytest.raises(ValueError):
        D.becker_sup(D.constant_power(0.3), 0.0, m=8)


@given(builtin_drivers(), ts)
def test_becker_bound_holds(d, t):
    assert D.becker_sup(d, t) <= d.k + 1e-6


def test_check_becker_reports_violations():
    good = D.custom(lambda z, t: (1 - 0.4 * z) / (1 + 0.4 * z), 0.5, True)
    bad = D.custom(lambda z, t: (1 - 0.4 * z) / (1 + 0.4 * z), 0.3, True)
    assert D.check_becker(good, [0, 1]) == []
    assert len(D.check_becker(bad, [0, 1])) == 2


def test_cayley_maps():
    c = D.CayleyData(0.4)
    assert c.L(1.0) == pytest.approx(1.0)
    y = np.linspace(-20, 20, 20)
    assert np.allclose(np.abs(c.H(c.L(1j * y))), 0.4)
    w = 0.4 * np.exp(2j * np.pi * np.arange(20) / 20)
    assert np.allclose(c.H(c.H_inv(w)), w)
    # interior of the half-plane lands strictly inside U(k)
    assert np.all(np.abs(c.H(c.L(np.array([0.5, 2 + 3j, 10])))) < 0.4)


def test_kappa():
    assert D.kappa(0.5) == pytest.approx(0.8)


# -- Taylor coefficients ---------------------------------------------------------------


@given(builtin_drivers(), ts)
def test_exact_taylor_matches_dft(d, t):
    exact = d.taylor(t, 6)
    assert exact.allclose(D.taylor_dft(d, t, 6), atol=1e-11)


def test_constant_power_taylor():
    c = D.constant_power(0.3, 0.0, 1).taylor(0.0, 4).coeffs
    # (1 - kz)/(1 + kz) = 1 - 2kz + 2k^2 z^2 - ...
    assert np.allclose(c, [1, -0.6, 0.18, -0.054, 0.0162])


def test_mirrored_driver():
    for d in [D.constant_power(0.3, 0.4, 3), D.extremal_a3(0.6), D.blaschke(0.5, 0.2, [0.3, 0.1j])]:
        z = np.array([0.2 + 0.1j, -0.7, 0.5j])
        for t in (0.0, 0.4, 2.0):
            assert np.allclose(d.mirrored()(z, t), d(-z, t), atol=1e-14)


# -- renormalization -------------------------------------------------------------------


def test_normalize_identity_for_normalized_input():
    d = D.constant_power(0.4, 0.3, 2)
    n = D.normalize_driver(d)
    assert n.normalized
    z = np.array([0.1, 0.5j, -0.9])
    for t in (0.0, 1.3, 4.0):
        assert np.allclose(n(z, t), d(z, t))


def _blaschke_Q(k, alpha, zeros, t):
    c = cmath.exp(1j * alpha)
    for a in zeros:
        c *= -a
    n = len(zeros)
    return t + 2 / n * (cmath.log(1 - k * c * math.exp(-n * t)) - cmath.log(1 - k * c))


@pytest.fixture(scope="module")
def renormalized():
    d = D.blaschke(0.5, 0.0, [0.4])
    return d, D.normalize_driver(d)


def test_origin_integral_matches_closed_form():
    d = D.blaschke(0.6, 0.8, [0.3 + 0.2j, -0.5j])
    ren = D._Renormalizer(d, 10.0, 1e-12)
    for t in (0.0, 0.37, 1.0, 4.2, 9.9):
        assert ren.Q(t) == pytest.approx(_blaschke_Q(0.6, 0.8, [0.3 + 0.2j, -0.5j], t), abs=1e-10)


def test_renormalized_is_normalized(renormalized):
    _, n = renormalized
    taus = np.linspace(0.0, 40.0, 50)
    assert max(abs(n.origin(tau) - 1) for tau in taus) <= 1e-9


def test_renormalized_bound(renormalized):
    _, n = renormalized
    assert n.k == pytest.approx(0.8)
    for tau in np.linspace(0.0, 6.0, 13):
        assert D.becker_sup(n, tau) <= 0.8 + 1e-6


def test_renormalized_range(renormalized):
    d, _ = renormalized
    n = D.normalize_driver(d, t_max=2.0)
    with pytest.raises(RangeError):
        n(0.1, 10.0)
