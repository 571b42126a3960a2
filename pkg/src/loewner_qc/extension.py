"""Becker extensions to ``|z| >= 1``, Beltrami coefficients, and finite-difference dilatation."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .drivers import CayleyData, Family, HerglotzDriver, extremal_t0
from .errors import BranchError, DerivativeError, DomainError, ZeroDivisorError
from ._io import open_text
from .loewner import chain_values

FD_STEP = 1e-5
DEGENERATE_FZ = 1e-4


def _scalar_or_array(za, vals):
    return complex(np.ravel(vals)[0]) if np.ndim(za) == 0 else vals


# -- extension maps -------------------------------------------------------------------


def becker_extend(d: HerglotzDriver, z, tol=1e-10):
    """Becker extension ``F(rho e^{i theta}) = f_{log rho}(e^{i theta})`` for ``|z| >= 1``."""
    za = np.asarray(z, dtype=complex)
    r = np.abs(za)
    if np.any(r < 1 - 1e-14):
        raise DomainError("becker_extend needs |z| >= 1")
    r = np.maximum(r, 1.0)
    vals = chain_values(d, np.log(r), za / r, tol)
    return _scalar_or_array(za, vals)


def extension_map(d: HerglotzDriver, tol=1e-10):
    """Vectorized evaluator ``z -> F(z)`` bound to a driver."""
    return lambda z: becker_extend(d, z, tol)


# -- Beltrami coefficients -----------------------------------------------------------


class BeltramiSource(enum.Enum):
    FROM_DRIVER = "from-driver"
    EXTREMAL_CLOSED_FORM = "extremal-closed-form"
    BLASCHKE_CLOSED_FORM = "blaschke-closed-form"
    NUMERIC_FD = "numeric-fd"


def _outside(z):
    za = np.asarray(z, dtype=complex)
    if np.any(np.abs(za) <= 1):
        raise DomainError("Beltrami coefficients are evaluated on |z| > 1")
    return za


def beltrami_of_driver(d: HerglotzDriver, z):
    """``mu(z) = (z^2/|z|^2) H(p(z/|z|, log|z|))`` with ``H(w) = (w - 1)/(w + 1)``."""
    za = _outside(z)
    r = np.abs(za)
    zeta = za / r
    p = d(zeta, np.log(r))
    return _scalar_or_array(za, zeta * zeta * CayleyData.H(p))


def extremal_beltrami(k, z):
    """Closed-form Beltrami coefficient of the extension generated by ``extremal_a3(k)``.

    ``-k zeta^4 (rho + conj z)/(rho + z)`` for ``1 < |z| < rho`` and ``-k zeta^3`` beyond,
    where ``zeta = z/|z|`` and ``rho = e^{t0}``.
    """
    za = _outside(z)
    return _scalar_or_array(za, extremal_mu_unchecked(k, za))


def extremal_mu_unchecked(k, z):
    """``extremal_beltrami`` without the domain check, for quadrature up to ``|z| = 1``."""
    rho = math.exp(extremal_t0(k))
    r = np.abs(z)
    zeta = z / r
    with np.errstate(invalid="ignore", divide="ignore"):
        inner = -k * zeta**4 * (rho + np.conj(z)) / (rho + z)
    return np.where(r < rho, inner, -k * zeta**3)


def blaschke_beltrami(d: HerglotzDriver, z):
    """Closed form ``k zeta^2 psi_t(zeta)`` for a Blaschke driver, ``t = log|z|``."""
    if d.family is not Family.BLASCHKE:
        raise ValueError("blaschke_beltrami needs a Blaschke driver")
    za = _outside(z)
    r = np.abs(za)
    zeta = za / r
    return _scalar_or_array(za, d.k * zeta * zeta * d.blaschke_factor(zeta, np.log(r)))


@dataclass(frozen=True)
class BeltramiField:
    """A Beltrami coefficient on ``|z| > 1`` with its origin and declared bound."""

    source: BeltramiSource
    k: float
    evaluator: object = field(repr=False)

    def __call__(self, z):
        return self.evaluator(z)

    @classmethod
    def from_driver(cls, d):
        return cls(BeltramiSource.FROM_DRIVER, d.k, lambda z: beltrami_of_driver(d, z))

    @classmethod
    def extremal(cls, k):
        return cls(BeltramiSource.EXTREMAL_CLOSED_FORM, k, lambda z: extremal_beltrami(k, z))

    @classmethod
    def blaschke(cls, d):
        return cls(BeltramiSource.BLASCHKE_CLOSED_FORM, d.k, lambda z: blaschke_beltrami(d, z))


def blaschke_quadratic_differential(d: HerglotzDriver):
    """``phi(z) = e^{-i alpha} z^{n-2} / prod (z - a_j)^2`` whose Teichmuller field the extension has."""
    if d.family is not Family.BLASCHKE:
        raise ValueError("needs a Blaschke driver")
    n = len(d.zeros)
    zeros = np.asarray(d.zeros, dtype=complex)

    def phi(z):
        z = np.asarray(z, dtype=complex)
        den = np.ones_like(z)
        for a in zeros:
            den = den * (z - a) ** 2
        return np.exp(-1j * d.phase) * z ** (n - 2) / den

    return phi


def laurent_differential(coeffs, first_power=-3):
    """``phi(z) = sum_j coeffs[j] z^{first_power - j}``."""
    coeffs = np.asarray(coeffs, dtype=complex)

    def phi(z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for j, c in enumerate(coeffs):
            out = out + c * z ** (first_power - j)
        return out

    return phi


def teichmuller_check(mu, phi, k, points, zero_tol=1e-300):
    """Max over ``points`` of ``|mu(z) - k conj(phi(z))/|phi(z)||``."""
    z = np.asarray(points, dtype=complex).ravel()
    ph = np.asarray(phi(z), dtype=complex)
    bad = np.abs(ph) <= zero_tol
    if np.any(bad):
        raise ZeroDivisorError(f"phi vanishes at {z[bad][0]!r}")
    target = k * np.conj(ph) / np.abs(ph)
    return float(np.max(np.abs(np.asarray(mu(z)) - target)))


# -- grids and finite differences ----------------------------------------------------


def annulus_grid(r_min, r_max, n_r, n_theta=None, angle_offset=0.5):
    """Polar grid with radii ``linspace(r_min, r_max, n_r)`` and angles ``2 pi (j + offset)/n``.

    The half-cell default offset keeps the grid off the real axis.
    """
    if n_theta is None:
        n_theta = n_r
    if n_r < 2 or n_theta < 2:
        raise ValueError("grid resolution must be >= 2")
    if not 0 < r_min <= r_max:
        raise ValueError("need 0 < r_min <= r_max")
    r = np.linspace(r_min, r_max, n_r)
    th = 2 * np.pi * (np.arange(n_theta) + angle_offset) / n_theta
    return (r[:, None] * np.exp(1j * th[None, :])).ravel()


def wirtinger(F, z, h=FD_STEP):
    """``(F_z, F_zbar)`` by fourth-order central differences along x and y."""
    z = np.asarray(z, dtype=complex).ravel()
    offsets = np.array([h, -h, 2 * h, -2 * h, 1j * h, -1j * h, 2j * h, -2j * h])
    vals = np.asarray(F((z[None, :] + offsets[:, None]).ravel()), dtype=complex).reshape(8, -1)
    fx = (8 * (vals[0] - vals[1]) - (vals[2] - vals[3])) / (12 * h)
    fy = (8 * (vals[4] - vals[5]) - (vals[6] - vals[7])) / (12 * h)
    return (fx - 1j * fy) / 2, (fx + 1j * fy) / 2


@dataclass
class QCReport:
    """Summary of a finite-difference dilatation sweep."""

    points: int
    h: float
    sup_dilatation: float
    worst_point: complex
    max_deviation: float | None = None
    deviation_point: complex | None = None
    failure_points: list = field(default_factory=list)


def numeric_dilatation(F, points, h=FD_STEP, analytic=None, degenerate=DEGENERATE_FZ, strict=False):
    """Estimate ``mu = F_zbar / F_z`` on ``points`` and compare with ``analytic`` if given.

    Points where ``|F_z| < degenerate`` or the stencil returns non-finite values are
    excluded and listed in ``failure_points``; ``strict`` turns them into DerivativeError.
    """
    z = np.asarray(points, dtype=complex).ravel()
    fz, fzb = wirtinger(F, z, h)
    bad = ~np.isfinite(fz) | ~np.isfinite(fzb) | (np.abs(fz) < degenerate)
    if strict and np.any(bad):
        raise DerivativeError(f"degenerate derivative at {z[bad][0]!r}")
    good = ~bad
    if not np.any(good):
        raise DerivativeError("no usable grid points")
    zg = z[good]
    mu = fzb[good] / fz[good]
    i = int(np.argmax(np.abs(mu)))
    rep = QCReport(
        points=int(good.sum()),
        h=h,
        sup_dilatation=float(abs(mu[i])),
        worst_point=complex(zg[i]),
        failure_points=[complex(p) for p in z[bad]],
    )
    if analytic is not None:
        dev = np.abs(mu - np.asarray(analytic(zg), dtype=complex))
        j = int(np.argmax(dev))
        rep.max_deviation = float(dev[j])
        rep.deviation_point = complex(zg[j])
    return rep


# -- chain diagnostics ----------------------------------------------------------------


def seam_gap(d: HerglotzDriver, n_angles=64, delta=1e-4, tol=1e-10):
    """Max over angles of ``|F((1 + delta) e^{i theta}) - f((1 - delta) e^{i theta})|``."""
    e = np.exp(2j * np.pi * np.arange(n_angles) / n_angles)
    outer = becker_extend(d, (1 + delta) * e, tol)
    inner = chain_values(d, 0.0, (1 - delta) * e, tol)
    return float(np.max(np.abs(outer - inner)))


def estimate_driver(d: HerglotzDriver, z, t, dt=1e-4, dz=1e-4, tol=1e-12):
    """Driver recovered from the chain as ``(d f_t/dt) / (z f_t')`` by central differences."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if t < dt:
        raise ValueError("t must be >= dt for a central difference")
    ft = (chain_values(d, t + dt, z, tol) - chain_values(d, t - dt, z, tol)) / (2 * dt)
    fp = (chain_values(d, t, z + dz, tol) - chain_values(d, t, z - dz, tol)) / (2 * dz)
    return ft / (z * fp)


# -- spiral example -------------------------------------------------------------------


def _check_branch(z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.isclose(z, 1.0, rtol=0, atol=1e-15) | np.isclose(z, -1.0, rtol=0, atol=1e-15)):
        raise BranchError("branch points at z = +-1")
    return z


def spiral_f(z):
    """``2 z e^{-arcsin z} / (1 + sqrt(1 - z^2))`` with principal branches, ``f(z)/z -> 1``."""
    z = _check_branch(z)
    s = np.sqrt(1 - z * z)
    return 2 * z * np.exp(-np.arcsin(z)) / (1 + s)


def spiral_fprime(z):
    """Analytic derivative; ``z f'/f = (1 - z)/sqrt(1 - z^2)``."""
    z = _check_branch(z)
    s = np.sqrt(1 - z * z)
    f = 2 * np.exp(-np.arcsin(z)) / (1 + s)
    return f * (1 - z) / s


def spiral_p(z):
    """``sqrt((1 + z)/(1 - z))``, equal to ``f/(z f')`` on the disk."""
    z = _check_branch(z)
    return np.sqrt((1 + z) / (1 - z))


def spiral_identity_error(points):
    """Max of ``|f/(z f') - sqrt((1+z)/(1-z))|`` over nonzero disk points."""
    z = np.asarray(points, dtype=complex).ravel()
    if np.any(np.abs(z) >= 1):
        raise DomainError("samples must lie in the open disk")
    z = z[z != 0]
    # f/(z f') without cancelling: uses the closed-form f and f' separately
    lhs = spiral_f(z) / (z * spiral_fprime(z))
    return float(np.max(np.abs(lhs - spiral_p(z))))


def spiral_radius(w):
    """``r(w) = 2 exp(|Arg f(w)| - pi/2)``, the boundary radius in the direction of ``f(w)``."""
    return 2 * np.exp(np.abs(np.angle(spiral_f(w))) - np.pi / 2)


def betker_extension(z):
    """Betker's extension ``r(1/conj z)^2 / conj f(1/conj z)`` of the spiral map, ``z`` off the real axis.

    The two half-planes are evaluated independently; use ``betker_real_axis_jump``
    to inspect the mismatch across the real axis.
    """
    za = np.asarray(z, dtype=complex)
    if np.any(np.abs(za) < 1):
        raise DomainError("betker_extension needs |z| >= 1")
    if np.any(za.imag == 0):
        raise BranchError("the extension is evaluated off the real axis")
    w = 1 / np.conj(za)
    vals = spiral_radius(w) ** 2 / np.conj(spiral_f(w))
    return _scalar_or_array(za, vals)


def betker_real_axis_jump(x, eps=1e-9):
    """``|Phi(x + i eps) - Phi(x - i eps)|`` for real ``|x| > 1``."""
    x = np.asarray(x, dtype=float)
    return np.abs(betker_extension(x + 1j * eps) - betker_extension(x - 1j * eps))


def spiral_samples():
    """Evaluators for the spiral map: ``(f, identity_error, Phi)``."""
    return spiral_f, spiral_identity_error, betker_extension


# -- output ---------------------------------------------------------------------------


def write_extend_csv(path, z, F):
    """Rows ``re_z,im_z,re_F,im_F`` with round-trip float formatting."""
    _write_complex_csv(path, ["re_z", "im_z", "re_F", "im_F"], z, F, with_abs=False)


def write_beltrami_csv(path, z, mu):
    """Rows ``re_z,im_z,re_mu,im_mu,abs_mu`` with round-trip float formatting."""
    _write_complex_csv(path, ["re_z", "im_z", "re_mu", "im_mu", "abs_mu"], z, mu, with_abs=True)


def _write_complex_csv(path, header, z, v, with_abs):
    z = np.asarray(z, dtype=complex).ravel()
    v = np.asarray(v, dtype=complex).ravel()
    with open_text(path) as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for a, b in zip(z, v):
            row = [a.real, a.imag, b.real, b.imag] + ([abs(b)] if with_abs else [])
            w.writerow([repr(float(x)) for x in row])
