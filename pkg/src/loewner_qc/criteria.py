"""Sufficient conditions for Becker extendibility and the explicit extensions they give."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, EvaluationError, SingularityError

AW_CONST = 4 * math.sqrt(3) / 9
DISK_EDGE = 1 - 1e-3
OPEN_DISK_EDGE = 1 - 1e-9


def _values(func, *args):
    with np.errstate(all="ignore"):
        try:
            out = func(*args)
        except ZeroDivisionError:
            out = np.full(np.broadcast(*args).shape, np.nan + 0j)
    return np.broadcast_to(np.asarray(out, dtype=complex), np.broadcast(*args).shape)


def disk_grid(n_r=40, n_theta=64, r_max=DISK_EDGE):
    """Polar grid of the disk ``|z| <= r_max`` including the origin."""
    r = np.linspace(0.0, r_max, n_r)[1:]
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    return np.concatenate(([0j], (r[:, None] * np.exp(1j * th[None, :])).ravel()))


# -- analytic samples ------------------------------------------------------------------


@dataclass
class AnalyticSample:
    """Closed-form ``f`` with derivatives, vectorized over numpy arrays.

    ``fppp`` is optional; without it the Schwarzian falls back to finite differences.
    """

    f: Callable
    fp: Callable
    fpp: Callable
    fppp: Callable | None = None
    label: str = ""

    @property
    def a2(self):
        return complex(_values(self.fpp, np.asarray(0j))) / 2

    def normalization_error(self):
        """``max(|f(0)|, |f'(0) - 1|)``."""
        z0 = np.asarray(0j)
        return max(abs(complex(_values(self.f, z0))), abs(complex(_values(self.fp, z0)) - 1))

    def pre_schwarzian(self, z):
        z = np.asarray(z, dtype=complex)
        return _values(self.fpp, z) / _values(self.fp, z)

    def schwarzian(self, z):
        """``S_f = f'''/f' - (3/2)(f''/f')^2``, or the finite-difference form without ``fppp``."""
        if self.fppp is None:
            return self.schwarzian_fd(z)
        z = np.asarray(z, dtype=complex)
        g = self.pre_schwarzian(z)
        return _values(self.fppp, z) / _values(self.fp, z) - 1.5 * g * g

    def schwarzian_fd(self, z, h=1e-4):
        """``(f''/f')' - (f''/f')^2/2`` with a five-point stencil and one Richardson step."""
        z = np.asarray(z, dtype=complex)
        g = self.pre_schwarzian

        def d(hh):
            return (-g(z + 2 * hh) + 8 * g(z + hh) - 8 * g(z - hh) + g(z - 2 * hh)) / (12 * hh)

        dg = (16 * d(h / 2) - d(h)) / 15
        gz = g(z)
        return dg - gz * gz / 2


def polynomial_sample(coeffs, label=""):
    """``AnalyticSample`` of ``z + sum_{n>=2} coeffs[n-2] z^n``."""
    c = np.concatenate(([0.0, 1.0], np.asarray(coeffs, dtype=complex)))
    poly = np.polynomial.Polynomial(c)
    d1, d2, d3 = poly.deriv(1), poly.deriv(2), poly.deriv(3)
    return AnalyticSample(poly, d1, d2, d3, label)


def koebe_sample():
    """The Koebe function ``z/(1 - z)^2``."""
    return AnalyticSample(
        lambda z: z / (1 - z) ** 2,
        lambda z: (1 + z) / (1 - z) ** 3,
        lambda z: 2 * (z + 2) / (1 - z) ** 4,
        lambda z: 6 * (z + 3) / (1 - z) ** 5,
        "koebe",
    )


# -- checks ----------------------------------------------------------------------------


@dataclass
class CheckResult:
    condition: str
    ok: bool
    margin: float
    worst_point: complex

    def to_dict(self):
        return {
            "condition": self.condition,
            "ok": bool(self.ok),
            "margin": float(self.margin),
            "worst_point": [float(self.worst_point.real), float(self.worst_point.imag)],
        }


def _check(name, lhs, z, k):
    lhs = np.asarray(lhs, dtype=float)
    if not np.all(np.isfinite(lhs)):
        bad = z[~np.isfinite(lhs)]
        raise EvaluationError(f"{name}: non-finite values on the grid", points=list(bad))
    i = int(np.argmax(lhs))
    margin = k - float(lhs[i])
    return CheckResult(name, margin >= 0, margin, complex(z[i]))


def check_aw_becker(f: AnalyticSample, k, grid=None):
    """``(4 sqrt3/9)(1-|z|^2)|a_2| + (1-|z|^2)^2 |a_2^2 + S_f/2| <= k`` on the grid."""
    z = disk_grid() if grid is None else np.asarray(grid, dtype=complex).ravel()
    a2 = f.a2
    s = 1 - np.abs(z) ** 2
    lhs = AW_CONST * s * abs(a2) + s * s * np.abs(a2 * a2 + f.schwarzian(z) / 2)
    return _check("aw-becker", lhs, z, k)


def check_pre_schwarzian(f: AnalyticSample, k, grid=None):
    """``(1 - |z|^2)|f''/f'| <= k`` on the grid."""
    z = disk_grid() if grid is None else np.asarray(grid, dtype=complex).ravel()
    lhs = (1 - np.abs(z) ** 2) * np.abs(f.pre_schwarzian(z))
    return _check("pre-schwarzian", lhs, z, k)


def check_derivative(f: AnalyticSample, k, grid=None):
    """``|f'(z) - 1| <= k`` on the grid."""
    z = disk_grid() if grid is None else np.asarray(grid, dtype=complex).ravel()
    lhs = np.abs(_values(f.fp, z) - 1)
    return _check("derivative", lhs, z, k)


def threshold_k_star():
    """Positive root of ``4k^2 + (3 + 8 sqrt3/9) k - 1``, where ``q_of_k`` reaches 1."""
    b = 3 + 8 * math.sqrt(3) / 9
    return 2 / (b + math.sqrt(b * b + 16))


def q_of_k(k):
    """``(3 + 8 sqrt3/9) k + 4 k^2``."""
    return (3 + 8 * math.sqrt(3) / 9) * k + 4 * k * k


# -- extensions from a PDE solution ----------------------------------------------------


@dataclass
class PDEExtensionSpec:
    """Closed-form solution ``Phi(z, w)`` of ``Phi_w = phi Phi_z`` with ``Phi(z, z) = f(z)``."""

    Phi: Callable
    phi: Callable
    eps: float
    M: float
    k: float
    f: Callable | None = None
    label: str = ""

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.M <= 0:
            raise ValueError("M must be positive")


@dataclass
class PDEReport:
    k: float
    cond_i: bool
    diagonal_error: float
    cond_ii_max: float
    cond_ii_point: tuple
    growth_ok: bool
    growth_max_ratio: float
    skipped: list = field(default_factory=list)

    @property
    def ok(self):
        return self.cond_i and self.cond_ii_max <= self.k and self.growth_ok


def _wr_grid(n_w, n_theta, n_r):
    rad = OPEN_DISK_EDGE * np.arange(1, n_w + 1) / n_w
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    w = (rad[:, None] * np.exp(1j * th[None, :])).ravel()
    s = np.linspace(0.0, 1.0, n_r)
    aw2 = np.abs(w) ** 2
    r = aw2[:, None] + (1 - aw2[:, None]) * s[None, :]
    return np.broadcast_to(w[:, None], r.shape).ravel(), r.ravel()


def check_pde_conditions(spec: PDEExtensionSpec, n_w=40, n_theta=64, n_r=41, n_growth=40):
    """Numerical check of the conditions that make ``Phi(z, 1/conj z)`` a Becker extension.

    * (i): ``phi(0, 0) = 0`` and, when ``spec.f`` is given, ``Phi(z, z) = f(z)`` on the disk;
    * (ii): ``max r |phi(w/r, w)|`` over ``|w| < 1``, ``|w|^2 <= r <= 1`` against ``k``;
    * growth: ``|Phi(z, w)| <= M |z|`` for ``|z|`` in ``[1, 1e3]``, ``|z w| <= eps^2``.

    Points where the callbacks are non-finite (poles) are skipped and listed.
    """
    skipped = []
    phi00 = complex(_values(spec.phi, np.asarray(0j), np.asarray(0j)))
    diag_err = 0.0
    if spec.f is not None:
        zd = disk_grid(20, 32, OPEN_DISK_EDGE)
        diff = np.abs(_values(spec.Phi, zd, zd) - _values(spec.f, zd))
        fin = np.isfinite(diff)
        skipped += list(zd[~fin])
        diag_err = float(np.max(diff[fin])) if np.any(fin) else math.inf
    cond_i = bool(np.isfinite(phi00) and abs(phi00) <= 1e-12 and diag_err <= 1e-10)

    w, r = _wr_grid(n_w, n_theta, n_r)
    vals = r * np.abs(_values(spec.phi, w / r, w))
    fin = np.isfinite(vals)
    skipped += list(w[~fin])
    if not np.any(fin):
        raise EvaluationError("phi is non-finite on the whole grid", points=skipped)
    i = int(np.argmax(np.where(fin, vals, -np.inf)))
    cond_ii_max = float(vals[i])

    zr = np.logspace(0, 3, n_growth)
    th = 2 * np.pi * np.arange(16) / 16
    z = (zr[:, None] * np.exp(1j * th[None, :])).ravel()
    frac = np.linspace(0.0, 1.0, 5)
    beta = 2 * np.pi * np.arange(8) / 8
    wmod = spec.eps**2 / np.abs(z)
    wg = (wmod[:, None, None] * frac[None, :, None] * np.exp(1j * beta[None, None, :]))
    zg = np.broadcast_to(z[:, None, None], wg.shape)
    ratio = np.abs(_values(spec.Phi, zg.ravel(), wg.ravel())) / np.abs(zg.ravel())
    gfin = np.isfinite(ratio)
    skipped += list(zg.ravel()[~gfin])
    growth_max = float(np.max(ratio[gfin])) if np.any(gfin) else math.inf

    return PDEReport(
        k=spec.k,
        cond_i=cond_i,
        diagonal_error=diag_err,
        cond_ii_max=cond_ii_max,
        cond_ii_point=(complex(w[i]), float(r[i])),
        growth_ok=growth_max <= spec.M,
        growth_max_ratio=growth_max,
        skipped=skipped,
    )


def pde_extend(spec: PDEExtensionSpec, z):
    """``F(z) = Phi(z, 1/conj z)`` for ``|z| > 1``."""
    za = np.asarray(z, dtype=complex)
    if np.any(np.abs(za) <= 1):
        raise DomainError("pde_extend needs |z| > 1")
    vals = _values(spec.Phi, za, 1 / np.conj(za))
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise EvaluationError("Phi has a pole on the requested points", points=list(np.ravel(za[bad])))
    return complex(vals) if za.ndim == 0 else vals


def example1_spec(f: AnalyticSample, k, eps=0.5, M=10.0):
    """``Phi = f(w) + (z - w) f'(w)``, ``phi = (z - w) f''(w)/f'(w)``."""
    return PDEExtensionSpec(
        Phi=lambda z, w: f.f(w) + (z - w) * f.fp(w),
        phi=lambda z, w: (z - w) * f.fpp(w) / f.fp(w),
        eps=eps,
        M=M,
        k=k,
        f=f.f,
        label="example-1",
    )


def example2_spec(f: AnalyticSample, k, eps=0.5, M=10.0):
    """``Phi = f(w) + z - w``, ``phi = f'(w) - 1``."""
    return PDEExtensionSpec(
        Phi=lambda z, w: f.f(w) + z - w,
        phi=lambda z, w: f.fp(w) - 1 + 0 * z,
        eps=eps,
        M=M,
        k=k,
        f=f.f,
        label="example-2",
    )


def _aw_Phi(f: AnalyticSample, z, w):
    # multiplied through by (z - w), which removes the singularity on the diagonal
    d = z - w
    den = 1 + d * (f.a2 - 0.5 * f.pre_schwarzian(w))
    return f.f(w) + f.fp(w) * d / den, den


def aw_becker_spec(f: AnalyticSample, k, eps=0.25, M=10.0):
    """Spec for the Schwarzian-type condition: ``phi = 2 a_2 (z-w) + (z-w)^2 (a_2^2 + S_f(w)/2)``."""
    a2 = f.a2
    return PDEExtensionSpec(
        Phi=lambda z, w: _aw_Phi(f, z, w)[0],
        phi=lambda z, w: 2 * a2 * (z - w) + (z - w) ** 2 * (a2 * a2 + f.schwarzian(w) / 2),
        eps=eps,
        M=M,
        k=k,
        f=f.f,
        label="aw-becker",
    )


def aw_becker_extend(f: AnalyticSample, z, zero_tol=1e-14):
    """``F(z) = Phi(z, 1/conj z)`` with ``Phi = f(w) + f'(w) / (1/(z-w) + a_2 - f''(w)/(2 f'(w)))``."""
    za = np.asarray(z, dtype=complex)
    if np.any(np.abs(za) <= 1):
        raise DomainError("aw_becker_extend needs |z| > 1")
    w = 1 / np.conj(za)
    with np.errstate(all="ignore"):
        vals, den = _aw_Phi(f, za, w)
    bad = ~np.isfinite(den) | (np.abs(den) <= zero_tol)
    if np.any(bad):
        loc = complex(np.ravel(za[bad])[0]) if za.ndim else complex(za)
        raise SingularityError("vanishing denominator in the extension formula", location=loc)
    return complex(vals) if za.ndim == 0 else vals


def report_json(results):
    """JSON text for a list of ``CheckResult``."""
    return json.dumps([r.to_dict() for r in results], indent=2)
