"""Herglotz drivers ``p(z, t)`` for the radial Loewner-Kufarev equation.

Built-in families::

    ConstantPower  p = (1 - c z^n) / (1 + c z^n),  c = k exp(-i theta)
    ExtremalA3     the two-phase driver that maximises Re a_3 under the Becker bound
    Blaschke       p = (1 + k psi_t) / (1 - k psi_t),  psi_t a finite Blaschke product
    Custom         user callback ``func(z, t)`` (vectorised in z) plus a declared bound

Drivers are immutable; every evaluator accepts scalar or array ``z``.
"""

from __future__ import annotations

import bisect
import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import _fallback
from .errors import ConvergenceError, DomainError, RangeError, SingularityError
from .series import TruncatedSeries

BOUNDARY_RADIUS = 1 - 1e-9


class Family(enum.Enum):
    CONSTANT_POWER = "constant-power"
    EXTREMAL_A3 = "extremal-a3"
    BLASCHKE = "blaschke"
    CUSTOM = "custom"


_KERNEL_CODES = {
    Family.CONSTANT_POWER: _fallback.CONSTANT_POWER,
    Family.EXTREMAL_A3: _fallback.EXTREMAL_A3,
    Family.BLASCHKE: _fallback.BLASCHKE,
}


def kappa(k):
    """Becker bound of the renormalised driver, ``2k / (1 + k^2)``."""
    return 2 * k / (1 + k * k)


@dataclass(frozen=True)
class CayleyData:
    """Maps between the right half-plane, ``U(k)`` and the disk of radius ``k``."""

    k: float

    @property
    def K(self):
        return (1 + self.k) / (1 - self.k)

    @staticmethod
    def H(zeta):
        """Right half-plane onto the unit disk; sends ``U(k)`` onto ``|w| <= k``."""
        return (zeta - 1) / (zeta + 1)

    @staticmethod
    def H_inv(w):
        return (1 + w) / (1 - w)

    def L(self, z):
        """Right half-plane onto ``U(k)`` with ``L(1) = 1``."""
        K = self.K
        return (1 + K * z) / (K + z)


def extremal_t0(k):
    return (1 - k) / (2 * k)


@dataclass(frozen=True)
class HerglotzDriver:
    family: Family
    k: float
    phase: float = 0.0
    n: int = 1
    zeros: tuple = ()
    func: Callable | None = field(default=None, compare=False)
    declared_normalized: bool | None = None
    custom_breakpoints: tuple = ()

    def __post_init__(self):
        if not 0 < self.k < 1:
            raise RangeError(f"k must lie in (0, 1), got {self.k}")
        if self.family is Family.CUSTOM and self.func is None:
            raise ValueError("custom drivers need an evaluation callback")
        if self.family is Family.BLASCHKE:
            if not self.zeros:
                raise ValueError("Blaschke driver needs at least one zero")
            if any(abs(a) >= 1 for a in self.zeros):
                raise DomainError("Blaschke zeros must lie in the open unit disk")
        if self.family is Family.CONSTANT_POWER and self.n < 1:
            raise ValueError("n must be a positive integer")

    # -- metadata -------------------------------------------------------------

    @property
    def normalized(self):
        if self.family in (Family.CONSTANT_POWER, Family.EXTREMAL_A3):
            return True
        if self.family is Family.BLASCHKE:
            return any(a == 0 for a in self.zeros)
        return bool(self.declared_normalized)

    @property
    def t0(self):
        return extremal_t0(self.k) if self.family is Family.EXTREMAL_A3 else 0.0

    @property
    def breakpoints(self):
        if self.family is Family.EXTREMAL_A3:
            return (self.t0,)
        return tuple(self.custom_breakpoints)

    @property
    def builtin(self):
        return self.family in _KERNEL_CODES

    def kernel_spec(self):
        """Tuple consumed by the integration kernels (built-in families only)."""
        return (
            _KERNEL_CODES[self.family],
            float(self.k),
            float(self.phase),
            int(self.n),
            np.array(self.zeros, dtype=complex),
            float(self.t0),
            self.normalized,
        )

    def scalar_evaluators(self):
        """Scalar ``p(z, t)`` and ``p(0, t)`` for the Python integrator."""
        if self.builtin:
            return _fallback.builtin_driver(self.kernel_spec())
        func = self.func

        def p(z, t):
            return complex(func(z, t))

        def p0(t):
            return complex(func(0j, t))

        return p, p0

    # -- evaluation -----------------------------------------------------------

    def __call__(self, z, t):
        """``p(z, t)``, broadcasting over ``z`` and ``t``; no domain checks."""
        z = np.asarray(z, dtype=complex)
        k = self.k
        if self.family is Family.CONSTANT_POWER:
            x = k * np.exp(-1j * self.phase) * z**self.n
            return (1 - x) / (1 + x)
        if self.family is Family.EXTREMAL_A3:
            z = np.exp(1j * self.phase) * z
            t = np.asarray(t, dtype=float)
            s = np.exp(np.minimum(t - self.t0, 0.0))
            early = (1 - k * z * z + (1 - k) * s * z) / (1 + k * z * z + (1 + k) * s * z)
            return np.where(t < self.t0, early, (1 - k * z) / (1 + k * z))
        if self.family is Family.BLASCHKE:
            x = k * self.blaschke_factor(z, t)
            return (1 + x) / (1 - x)
        if np.ndim(t) == 0:
            return np.asarray(self.func(z, float(t)), dtype=complex)
        zb, tb = np.broadcast_arrays(z, np.asarray(t, dtype=float))
        out = np.empty(zb.shape, dtype=complex)
        for idx in np.ndindex(zb.shape):
            out[idx] = complex(self.func(zb[idx], float(tb[idx])))
        return out

    def blaschke_factor(self, z, t):
        """``psi_t(z) = e^{i alpha} prod (z - e^{-t} a_j) / (1 - e^{-t} conj(a_j) z)``."""
        z = np.asarray(z, dtype=complex)
        e = np.exp(-np.asarray(t, dtype=float))
        psi = np.full(np.broadcast(z, e).shape, np.exp(1j * self.phase), dtype=complex)
        for a in self.zeros:
            b = e * complex(a)
            psi = psi * (z - b) / (1 - np.conj(b) * z)
        return psi

    def origin(self, t):
        """``p(0, t)``."""
        return complex(self(0j, t))

    def taylor(self, t, order):
        """Taylor coefficients of ``p(., t)`` through ``order``.

        Exact series arithmetic for the built-in families; DFT extraction otherwise.
        """
        if not self.builtin:
            return taylor_dft(self, t, order)
        z = TruncatedSeries.variable(order)
        k = self.k
        if self.family is Family.CONSTANT_POWER:
            x = (z**self.n) * (k * np.exp(-1j * self.phase))
            return (1 - x) / (1 + x)
        if self.family is Family.EXTREMAL_A3:
            z = z * np.exp(1j * self.phase)
            if t < self.t0:
                s = math.exp(t - self.t0)
                num = 1 - k * z * z + (1 - k) * s * z
                den = 1 + k * z * z + (1 + k) * s * z
                return num / den
            return (1 - k * z) / (1 + k * z)
        e = math.exp(-t)
        psi = TruncatedSeries.constant(np.exp(1j * self.phase), order)
        for a in self.zeros:
            b = e * complex(a)
            psi = psi * (z - b) / (1 - np.conj(b) * z)
        x = psi * k
        return (1 + x) / (1 - x)

    # -- derived drivers --------------------------------------------------------

    def mirrored(self):
        """Driver of ``z -> -f(-z)``: ``p(-z, t)``."""
        if self.family is Family.EXTREMAL_A3:
            return _replace_phase(self, self.phase + math.pi)
        if self.family is Family.CONSTANT_POWER:
            # (-z)^n = e^{i pi n} z^n
            return _replace_phase(self, self.phase - math.pi * self.n)
        if self.family is Family.BLASCHKE:
            return blaschke(self.k, self.phase + math.pi * len(self.zeros), [-a for a in self.zeros])
        func = self.func
        return custom(lambda z, t: func(-np.asarray(z), t), self.k, self.normalized,
                      self.custom_breakpoints)


def _replace_phase(d, phase):
    return HerglotzDriver(d.family, d.k, phase, d.n, d.zeros, d.func, d.declared_normalized,
                          d.custom_breakpoints)


def constant_power(k, theta=0.0, n=1):
    return HerglotzDriver(Family.CONSTANT_POWER, k, theta, n)


def extremal_a3(k, sign=1):
    """The extremal driver for ``max Re a_3``; ``sign=-1`` gives ``f_-(z) = -f_+(-z)``."""
    return HerglotzDriver(Family.EXTREMAL_A3, k, 0.0 if sign > 0 else math.pi)


def blaschke(k, alpha, zeros):
    return HerglotzDriver(Family.BLASCHKE, k, alpha, len(zeros), tuple(complex(a) for a in zeros))


def custom(func, k, normalized, breakpoints=()):
    return HerglotzDriver(Family.CUSTOM, k, func=func, declared_normalized=normalized,
                          custom_breakpoints=tuple(breakpoints))


def eval_driver(d, z, t):
    """``p(z, t)`` with domain checks."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    za = np.asarray(z, dtype=complex)
    if np.any(np.abs(za) > 1):
        raise DomainError("driver is only defined on the closed unit disk")
    with np.errstate(divide="ignore", invalid="ignore"):
        p = d(za, t)
    if not np.all(np.isfinite(p)):
        bad = za[~np.isfinite(p)] if za.ndim else za
        raise SingularityError("driver denominator vanished", location=bad)
    return complex(p) if np.ndim(p) == 0 else p


def becker_sup(d, t, m=256, radius=BOUNDARY_RADIUS, refine_tol=1e-8, max_m=1 << 16):
    """Sampled ``sup |H(p(z, t))|`` over the disk, from a circle close to the boundary.

    The grid is doubled from ``m`` until successive values change by less than
    ``refine_tol``.
    """
    if m < 16:
        raise ValueError("need at least 16 samples")

    def sample(mm):
        z = radius * np.exp(2j * np.pi * np.arange(mm) / mm)
        return float(np.max(np.abs(CayleyData.H(eval_driver(d, z, t)))))

    val = sample(m)
    while m < max_m:
        m *= 2
        new = sample(m)
        if abs(new - val) < refine_tol:
            return max(new, val)
        val = new
    return val


def check_becker(d, ts, m=256, tol=1e-6):
    """Verify the declared bound on a time grid; returns the list of violations ``(t, sup)``."""
    out = []
    for t in ts:
        s = becker_sup(d, t, m)
        if s > d.k + tol:
            out.append((float(t), s))
    return out


def taylor_dft(d, t, order, radius=0.5, outer=0.75, tol=1e-13, max_points=1 << 12):
    """Taylor coefficients ``p_0..p_order`` of ``p(., t)`` from a DFT on ``|z| = radius``.

    Point count starts at ``2^ceil(log2(4 order))`` and doubles until the Cauchy-estimate
    aliasing bound ``S (1/outer)^order q / (1 - q)``, ``q = (radius/outer)^M``, with ``S``
    the sampled sup of ``|p|`` on ``|z| = outer``, drops below ``tol``.
    """
    order = max(int(order), 1)
    m = 1 << math.ceil(math.log2(4 * order))
    ring = outer * np.exp(2j * np.pi * np.arange(256) / 256)
    S = float(np.max(np.abs(d(ring, t))))
    while m < max_points:
        q = (radius / outer) ** m
        if S * outer ** (-order) * q / (1 - q) <= tol:
            break
        m *= 2
    z = radius * np.exp(2j * np.pi * np.arange(m) / m)
    c = np.fft.fft(d(z, t)) / m
    c = c[: order + 1] / radius ** np.arange(order + 1)
    return TruncatedSeries(c, order)


# -- renormalisation ------------------------------------------------------------------


def adaptive_simpson(f, a, b, tol, max_depth=48):
    """Adaptive Simpson quadrature of a (possibly complex or array-valued) function."""
    fa, fm, fb = f(a), f((a + b) / 2), f(b)
    whole = (b - a) * (fa + 4 * fm + fb) / 6
    return _simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = (a + b) / 2
    lm, rm = (a + m) / 2, (m + b) / 2
    flm, frm = f(lm), f(rm)
    left = (m - a) * (fa + 4 * flm + fm) / 6
    right = (b - m) * (fm + 4 * frm + fb) / 6
    delta = left + right - whole
    if depth <= 0 or np.all(np.abs(delta) <= 15 * tol):
        return left + right + delta / 15
    return _simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + _simpson_rec(
        f, m, b, fm, frm, fb, right, tol / 2, depth - 1
    )


class _Renormalizer:
    """Evaluator of the renormalised driver ``p0(zeta, tau)``.

    ``Q(t) = int_0^t p(0, s) ds`` is tabulated on cells split at the driver
    breakpoints; ``tau -> t`` inverts ``Re Q`` by bracketed root-finding inside a cell.
    """

    def __init__(self, d, t_max, quad_tol, cell=0.05):
        self.d = d
        self.quad_tol = quad_tol
        nodes = set(np.linspace(0.0, t_max, int(math.ceil(t_max / cell)) + 1).tolist())
        nodes.update(b for b in d.breakpoints if 0 < b < t_max)
        self.nodes = sorted(nodes)
        Q = [0j]
        for a, b in zip(self.nodes[:-1], self.nodes[1:]):
            Q.append(Q[-1] + self._segment(a, b))
        self.Q_nodes = Q
        self.tau_nodes = [q.real for q in Q]

    def _segment(self, a, b):
        return complex(adaptive_simpson(self.d.origin, a, b, self.quad_tol))

    def Q(self, t):
        i = max(bisect.bisect_right(self.nodes, t) - 1, 0)
        i = min(i, len(self.nodes) - 1)
        return self.Q_nodes[i] + (self._segment(self.nodes[i], t) if t > self.nodes[i] else 0)

    @functools.lru_cache(maxsize=1 << 14)
    def time_of(self, tau):
        if tau < 0:
            raise RangeError("tau must be >= 0")
        if tau > self.tau_nodes[-1]:
            raise RangeError(f"tau={tau} beyond Re Q(t_max)={self.tau_nodes[-1]}")
        i = bisect.bisect_right(self.tau_nodes, tau) - 1
        if i >= len(self.nodes) - 1:
            return self.nodes[-1]
        a, b = self.nodes[i], self.nodes[i + 1]
        if tau == self.tau_nodes[i]:
            return a
        base = self.Q_nodes[i].real
        try:
            t, info = brentq(lambda s: base + self._segment(a, s).real - tau if s > a else base - tau,
                             a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, full_output=True)
        except ValueError as exc:
            raise ConvergenceError(f"Q inversion failed at tau={tau}: {exc}") from exc
        if not info.converged:
            raise ConvergenceError(f"Q inversion did not converge at tau={tau}")
        return t

    def __call__(self, zeta, tau):
        t = self.time_of(float(tau))
        q = self.Q(t)
        p_origin = self.d.origin(t)
        z = np.exp(-1j * q.imag) * np.asarray(zeta, dtype=complex)
        return (self.d(z, t) - 1j * p_origin.imag) / p_origin.real


def normalize_driver(d, t_max=90.0, quad_tol=1e-10):
    """Renormalised driver ``p0`` with ``p0(0, tau) = 1`` generating the same map.

    ``p0(e^{i Im Q(t)} z, Re Q(t)) = (p(z, t) - i Im p(0, t)) / Re p(0, t)``; the result
    satisfies the Becker condition with bound ``kappa(k)``.  ``t_max`` must be large
    enough that ``Re Q(t_max)`` covers the integration horizon used downstream.
    """
    if d.normalized:
        # Q(t) = t and the transform is the identity
        return d if d.family is Family.CUSTOM else custom(d.__call__, d.k, True, d.breakpoints)
    ren = _Renormalizer(d, t_max, quad_tol)
    bps = tuple(ren.Q(b).real for b in d.breakpoints if b < t_max)
    return custom(ren, kappa(d.k), True, bps)
