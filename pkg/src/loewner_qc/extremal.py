"""Sharp third-coefficient bound, the extremal control, comparison bounds and the
Hamilton-Krushkal functional of the extremal Beltrami coefficient."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import drivers
from ._io import open_text
from .drivers import adaptive_simpson, extremal_t0
from .errors import RangeError, TruncationError
from .extension import extremal_mu_unchecked


def _check_k(k):
    if not 0 < k < 1:
        raise RangeError(f"k must lie in (0, 1), got {k}")


# -- coefficient bounds --------------------------------------------------------------


def sharp_a3_bound(k):
    """``max |a_3| = k (1 + e^{1 - 1/k} (1 + k))`` over Becker-extendible maps with bound k."""
    _check_k(k)
    return k + sharp_a3_excess(k)


def sharp_a3_excess(k):
    """``sharp_a3_bound(k) - k``, evaluated without cancellation for small k."""
    _check_k(k)
    return k * math.exp(1 - 1 / k) * (1 + k)


def sharp_a3_log_excess(k):
    """``log(sharp_a3_bound(k) - k)``; finite where the excess itself underflows (k < ~0.0014)."""
    _check_k(k)
    return math.log(k) + 1 - 1 / k + math.log1p(k)


def fekete_szego_objective(alpha, k):
    """``(1 + 2 e^{-2 alpha/(1 - alpha)}) k + 4 alpha k^2``, continuous up to ``alpha = 1``."""
    alpha = np.asarray(alpha, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        e = np.where(alpha < 1, np.exp(-2 * alpha / np.where(alpha < 1, 1 - alpha, 1.0)), 0.0)
    return (1 + 2 * e) * k + 4 * alpha * k * k


def fekete_szego_bound(k, tol=1e-10, scan=200):
    """Minimum over ``alpha in (0, 1)`` of the Fekete-Szego-derived bound.

    Coarse scan of ``scan`` points, then golden-section search on the bracket around
    the best sample.  Returns ``(value, alpha)``.
    """
    _check_k(k)
    grid = (np.arange(scan) + 0.5) / scan
    vals = fekete_szego_objective(grid, k)
    j = int(np.argmin(vals))
    lo = grid[j - 1] if j > 0 else 0.0
    hi = grid[j + 1] if j < scan - 1 else 1.0
    res = minimize_scalar(
        lambda a: float(fekete_szego_objective(a, k)),
        bracket=(lo, grid[j], hi),
        method="golden",
        tol=tol,
    )
    alpha = float(res.x)
    value = float(res.fun)
    if value > vals[j]:
        alpha, value = float(grid[j]), float(vals[j])
    return value, alpha


def krushkal_bound(k, n):
    """Conjectured bound ``2k/(n - 1)`` for ``|a_n|``."""
    _check_k(k)
    if n < 2:
        raise RangeError("n must be >= 2")
    return 2 * k / (n - 1)


@dataclass(frozen=True)
class BoundRow:
    k: float
    becker_sharp: float
    fekete_szego: float
    krushkal: float

    @property
    def ordered(self):
        return self.krushkal < self.becker_sharp < self.fekete_szego


def figure1_table(k_grid):
    """Rows ``(k, sharp bound, Fekete-Szego bound, 2k/(n-1) at n = 3)``."""
    return [
        BoundRow(float(k), sharp_a3_bound(k), fekete_szego_bound(k)[0], krushkal_bound(k, 3))
        for k in k_grid
    ]


def write_figure1_csv(path, rows):
    """CSV ``k,becker_sharp,fekete_szego,krushkal`` to a path or text stream."""
    with open_text(path) as fh:
        w = csv.writer(fh)
        w.writerow(["k", "becker_sharp", "fekete_szego", "krushkal"])
        for r in rows:
            w.writerow([repr(float(x)) for x in (r.k, r.becker_sharp, r.fekete_szego, r.krushkal)])


# -- optimal control -----------------------------------------------------------------


@dataclass(frozen=True)
class ControlSynthesis:
    """Closed-form optimal control for maximizing ``Re a_3``.

    The controls are the first two Caratheodory coefficients ``c_1, c_2`` of the
    normalized half-plane function behind the driver, ``p_1 = k c_1`` and
    ``p_2 = k (c_2 - (1 - k) c_1^2 / 2)``.  ``a = 0`` is the degenerate branch
    whose optimum is ``c_1 = 0, c_2 = -2``.
    """

    k: float
    t0: float
    a: float

    @property
    def sign(self):
        return int(np.sign(self.a))

    def c1(self, t):
        t = np.asarray(t, dtype=float)
        if self.a == 0:
            return np.zeros_like(t) + 0j
        early = -np.exp(t) * self.a / (1 + self.k)
        return np.where(t < self.t0, early, -2.0 * self.sign) + 0j

    def c2(self, t):
        c1 = self.c1(t)
        return c1.real**2 + 1j * c1.real * c1.imag - 2

    def p1(self, t):
        return self.k * self.c1(t)

    def p2(self, t):
        c1 = self.c1(t)
        return self.k * (self.c2(t) - (1 - self.k) * c1 * c1 / 2)

    def a2(self, t):
        """Trajectory ``a_2(t)`` under the synthesized control."""
        t = np.asarray(t, dtype=float)
        k, t0 = self.k, self.t0
        if self.a == 0:
            return np.zeros_like(t)
        s = self.sign
        early = 2 * k * s * math.exp(-t0) * t
        late = 2 * k * s * (math.exp(-t0) * t0 + math.exp(-t0) - np.exp(-t))
        return np.where(t < t0, early, late)

    @property
    def a2_limit(self):
        return self.sign * (1 + self.k) * math.exp(-self.t0)

    def psi2(self, t):
        """Integrated adjoint ``a - 2 a_2(t)``."""
        return self.a - 2 * self.a2(t)

    def driver(self):
        if self.a == 0:
            return drivers.constant_power(self.k, 0.0, 2)
        return drivers.extremal_a3(self.k, self.sign)

    def caratheodory_slack(self, t):
        """``min(2 - |c_1|, 4 - |c_1|^2 - |2 c_2 - c_1^2|)``; non-negative when admissible."""
        c1, c2 = self.c1(t), self.c2(t)
        return np.minimum(2 - np.abs(c1), 4 - np.abs(c1) ** 2 - np.abs(2 * c2 - c1 * c1))


def synthesize_control(k, sign=1):
    """Optimal control data; ``sign`` in {+1, -1} picks ``a``, ``0`` the degenerate branch."""
    _check_k(k)
    if sign not in (-1, 0, 1):
        raise ValueError("sign must be -1, 0 or 1")
    t0 = extremal_t0(k)
    return ControlSynthesis(k, t0, sign * 2 * (1 + k) * math.exp(-t0))


def hamiltonian_re(k, t, a, a2, c1, c2):
    """``Re H`` with ``psi_3 = 1``, ``psi_2 = a - 2 a_2``; the ``a_2`` terms cancel."""
    e = math.exp(-t)
    return -k * (e * np.real(a * c1) + e * e * np.real(c2 - (1 - k) * c1 * c1 / 2))


def control_grid(n_r=64, n_theta=64, n_beta=32):
    """Admissible ``(c_1, c_2)`` samples: polar ``c_1`` with ``|c_1| <= 2`` and ``c_2`` on
    the boundary circle ``c_2 = c_1^2/2 + (4 - |c_1|^2) e^{i beta} / 2`` of its disk.

    ``Re H`` is affine in ``c_2``, so its maximum over each disk lies on that circle.
    """
    r = np.linspace(0.0, 2.0, n_r)
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    beta = 2 * np.pi * np.arange(n_beta) / n_beta
    c1 = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    c1 = np.unique(np.round(c1, 15))
    c2 = c1[:, None] ** 2 / 2 + (4 - np.abs(c1[:, None]) ** 2) / 2 * np.exp(1j * beta[None, :])
    c1 = np.broadcast_to(c1[:, None], c2.shape)
    return c1.ravel(), c2.ravel(), 2.0 / (n_r - 1)


@dataclass
class MaxPrincipleRow:
    t: float
    gap: float
    grid_maximizer: tuple
    control: tuple
    distance: float


@dataclass
class MaxPrincipleReport:
    k: float
    gap: float
    max_distance: float
    spacing: float
    rows: list


def verify_max_principle(k, t_samples, n_r=64, n_theta=64, n_beta=32, sign=1):
    """Compare ``Re H`` at the synthesized control with its max over an admissible grid.

    ``gap = max_grid Re H - Re H(c*)`` is at most 0 (up to rounding) when ``c*`` is
    optimal; ``distance`` is the separation of the grid maximizer from ``c*``.
    """
    ctrl = synthesize_control(k, sign)
    c1g, c2g, spacing = control_grid(n_r, n_theta, n_beta)
    rows = []
    for t in t_samples:
        t = float(t)
        h = hamiltonian_re(k, t, ctrl.a, ctrl.a2(t), c1g, c2g)
        i = int(np.argmax(h))
        c1s, c2s = complex(ctrl.c1(t)), complex(ctrl.c2(t))
        h_star = float(hamiltonian_re(k, t, ctrl.a, ctrl.a2(t), c1s, c2s))
        dist = math.hypot(abs(c1g[i] - c1s), abs(c2g[i] - c2s))
        rows.append(MaxPrincipleRow(t, float(h[i]) - h_star, (complex(c1g[i]), complex(c2g[i])),
                                    (c1s, c2s), dist))
    return MaxPrincipleReport(
        k=k,
        gap=max(r.gap for r in rows),
        max_distance=max(r.distance for r in rows),
        spacing=spacing,
        rows=rows,
    )


# -- Hamilton-Krushkal functional ----------------------------------------------------


def monomial_norm(m):
    """``L^1`` norm of ``z^{-m}`` over ``|z| > 1``: ``2 pi/(m - 2)``."""
    if m < 3:
        raise ValueError("z^-m is integrable outside the disk only for m >= 3")
    return 2 * math.pi / (m - 2)


def hk_lambda_closed_form(k, coeffs):
    """``Lambda(phi) = (1/k) int_{|z|>1} phi mu dx dy`` for ``phi = sum_j coeffs[j] z^{-(3+j)}``.

    With ``rho = e^{t0}``::

        Lambda / (2 pi) = -[(1 + log rho)/rho c_3
                            + (rho^2 - 2 log rho - 1)/2 sum_{m>=4} (-1)^m c_m / rho^{m-2}]
    """
    _check_k(k)
    rho = math.exp(extremal_t0(k))
    lr = math.log(rho)
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.size == 0:
        return 0j
    total = (1 + lr) / rho * coeffs[0]
    tail_factor = (rho * rho - 2 * lr - 1) / 2
    for j, c in enumerate(coeffs[1:]):
        m = 4 + j
        total += tail_factor * (-1) ** m * c / rho ** (m - 2)
    return complex(-2 * math.pi * total)


def _theta_points(r, rho):
    # the inner-zone integrand has Fourier decay (r/rho)^n
    q = r / rho
    if q < 1:
        need = 40.0 / max(1 - q, 1e-12)
        n = 1 << max(6, min(17, math.ceil(math.log2(need))))
    else:
        n = 256
    return n


def _ring_integral(func, r, n):
    th = 2 * np.pi * np.arange(n) / n
    z = r * np.exp(1j * th)
    return np.mean(func(z), axis=-1) * 2 * np.pi * r


def hk_lambda_quadrature(k, coeffs, tol=1e-6, max_radius=1e12):
    """Direct 2-D quadrature of ``(1/k) int phi mu`` over ``|z| > 1``.

    Adaptive Simpson in ``log r`` split at ``rho``, trapezoid in ``theta``; the domain is
    truncated at the radius where the tail bound ``2 pi sum |c_m| R^{2-m}/(m-2)`` drops
    below ``tol/2``.
    """
    _check_k(k)
    coeffs = np.asarray(coeffs, dtype=complex)
    if not np.any(coeffs):
        return 0j
    rho = math.exp(extremal_t0(k))
    ms = 3 + np.arange(coeffs.size)

    def tail(R):
        return float(np.sum(2 * np.pi * np.abs(coeffs) * R ** (2.0 - ms) / (ms - 2)))

    R = max(2 * rho, 10.0)
    while tail(R) > tol / 2:
        R *= 2
        if R > max_radius:
            raise TruncationError(f"tail bound above {tol / 2:g} even at R = {max_radius:g}")

    def phi(z):
        out = np.zeros_like(z)
        for c, m in zip(coeffs, ms):
            out = out + c * z ** (-int(m))
        return out

    def integrand(s):
        r = math.exp(s)
        n = _theta_points(r, rho)
        val = _ring_integral(lambda z: phi(z) * extremal_mu_unchecked(k, z), r, n)
        return val * r / k

    inner = adaptive_simpson(integrand, 0.0, math.log(rho), tol / 4)
    outer = adaptive_simpson(integrand, math.log(rho), math.log(R), tol / 4)
    return complex(inner + outer)


def laurent_l1_norm(coeffs, tol=1e-8, max_radius=1e12):
    """``L^1`` norm of ``sum_j coeffs[j] z^{-(3+j)}`` over ``|z| > 1`` (exact for monomials)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    nz = np.flatnonzero(coeffs)
    if nz.size == 0:
        return 0.0
    if nz.size == 1:
        return abs(coeffs[nz[0]]) * monomial_norm(3 + int(nz[0]))
    ms = 3 + np.arange(coeffs.size)
    R = 10.0
    while float(np.sum(2 * np.pi * np.abs(coeffs) * R ** (2.0 - ms) / (ms - 2))) > tol / 2:
        R *= 2
        if R > max_radius:
            raise TruncationError("L1 tail bound not reached")

    def integrand(s):
        r = math.exp(s)
        z = r * np.exp(2j * np.pi * np.arange(1024) / 1024)
        val = np.zeros_like(z)
        for c, m in zip(coeffs, ms):
            val = val + c * z ** (-int(m))
        return float(np.mean(np.abs(val))) * 2 * np.pi * r * r

    return float(adaptive_simpson(integrand, 0.0, math.log(R), tol / 2))


def hk_lambda(k, coeffs, normalize=False, quadrature=False, tol=1e-6):
    """Hamilton-Krushkal functional of the extremal field against a finite Laurent differential.

    ``coeffs[j]`` multiplies ``z^{-(3+j)}``.  ``normalize`` rescales ``phi`` to unit
    ``L^1`` norm first; ``quadrature`` selects the direct integral over the closed form.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if normalize and np.any(coeffs):
        coeffs = coeffs / laurent_l1_norm(coeffs)
    if quadrature:
        return hk_lambda_quadrature(k, coeffs, tol)
    return hk_lambda_closed_form(k, coeffs)
