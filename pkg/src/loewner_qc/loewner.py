"""Loewner-Kufarev trajectories, the generated univalent map, and coefficient flows."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core, _fallback
from .drivers import HerglotzDriver, taylor_dft
from .errors import ConvergenceError, DomainError, SeriesError, StepFailure
from .series import TruncatedSeries

HORIZONS = (10.0, 20.0, 40.0, 80.0)
RTOL = 1e-12
ATOL = 1e-14


def _raise_for_status(status, where):
    status = np.atleast_1d(status)
    if np.any(status == _fallback.STEP_UNDERFLOW):
        raise StepFailure(f"step size underflow in {where}")
    if np.any(status == _fallback.NON_MONOTONE):
        raise StepFailure(f"|w| failed to decrease along an accepted step in {where}")
    if np.any(status == _fallback.NOT_CONVERGED):
        raise ConvergenceError(f"{where}: limit not stable by T = {HORIZONS[-1]}")


@dataclass
class Trajectory:
    """Accepted-step samples of ``w(z0, t)``."""

    z0: complex
    t: np.ndarray
    w: np.ndarray

    def at(self, t):
        """Value at one of the sample times."""
        idx = np.searchsorted(self.t, t)
        if idx < len(self.t) and math.isclose(self.t[idx], t, abs_tol=1e-12):
            return self.w[idx]
        raise KeyError(f"t={t} is not a sample time")


def solve_trajectory(d: HerglotzDriver, z0, T, tol=1e-10):
    """Integrate ``dw/dt = -w p(w, t)``, ``w(0) = z0`` on ``[0, T]``.

    ``tol`` is the relative local error bound of the Dormand-Prince pair.  A point
    on the unit circle first takes one implicit Euler step of size 1e-6.
    """
    z0 = complex(z0)
    if abs(z0) > 1 + 1e-12:
        raise DomainError("z0 must lie in the closed unit disk")
    if T <= 0 or tol <= 0:
        raise ValueError("T and tol must be positive")
    p, p0 = d.scalar_evaluators()
    ts, ws, status = _fallback.trajectory(p, p0, z0, float(T), tol, tol * 1e-3, d.breakpoints)
    if status == _fallback.STEP_UNDERFLOW:
        raise StepFailure("step size underflow", t=float(ts[-1]))
    if status == _fallback.NON_MONOTONE:
        raise StepFailure("|w| increased along an accepted step", t=float(ts[-1]))
    return Trajectory(z0, ts, ws)


def chain_values(d: HerglotzDriver, ts, zs, tol=1e-10, rtol=RTOL, atol=ATOL, horizons=HORIZONS):
    """Chain elements ``f_t(z)`` for paired arrays of times and points (|z| <= 1).

    Works for non-normalized drivers too, through ``Q(t) = int_0^t p(0, s) ds``.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    ts, zs = np.broadcast_arrays(ts, zs)
    ts = np.ascontiguousarray(ts).ravel()
    zs_flat = np.ascontiguousarray(zs).ravel()
    if np.any(np.abs(zs_flat) > 1 + 1e-12):
        raise DomainError("chain elements are evaluated on the closed unit disk")
    if np.any(ts < 0):
        raise DomainError("t must be >= 0")
    if d.builtin:
        vals, status, _ = _core.chain_limits(d.kernel_spec(), ts, zs_flat, horizons, rtol, atol, tol)
    else:
        p, p0 = d.scalar_evaluators()
        vals = np.empty(len(zs_flat), dtype=complex)
        status = np.zeros(len(zs_flat), dtype=np.int64)
        cache = {}
        for i, (t, z) in enumerate(zip(ts, zs_flat)):
            t = float(t)
            if d.normalized:
                q_t = complex(t)
            else:
                if t not in cache:
                    cache[t] = _fallback.origin_integral(p0, t, rtol, atol, d.breakpoints)
                q_t = cache[t]
            vals[i], status[i], _ = _fallback.chain_limit(
                p, p0, t, z, q_t, horizons, rtol, atol, tol, d.breakpoints
            )
    _raise_for_status(status, "chain evaluation")
    return vals.reshape(zs.shape)


def map_limit(d: HerglotzDriver, z, tol=1e-10):
    """The univalent map ``f(z) = lim e^{Q(T)} w(z, T)`` generated by the driver.

    ``T`` runs through 10, 20, 40, 80 until successive values agree to ``tol``.
    """
    za = np.asarray(z, dtype=complex)
    if np.any(np.abs(za) >= 1):
        raise DomainError("map_limit needs |z| < 1")
    vals = chain_values(d, 0.0, za, tol)
    return complex(vals.ravel()[0]) if za.ndim == 0 else vals


def chain_at(d: HerglotzDriver, t, z, tol=1e-10):
    """Loewner chain element ``f_t(z)`` for ``|z| <= 1``, ``t >= 0``."""
    za = np.asarray(z, dtype=complex)
    vals = chain_values(d, t, za, tol)
    return complex(vals.ravel()[0]) if za.ndim == 0 else vals


@dataclass
class LoewnerSolution:
    """Driver plus solver settings, caching trajectories per starting point."""

    driver: HerglotzDriver
    T: float = 10.0
    tol: float = 1e-10
    _cache: dict = field(default_factory=dict, repr=False)

    def trajectory(self, z0):
        z0 = complex(z0)
        if z0 not in self._cache:
            self._cache[z0] = solve_trajectory(self.driver, z0, self.T, self.tol)
        return self._cache[z0]

    def map(self, z):
        return map_limit(self.driver, z, self.tol)


# -- coefficient flow -----------------------------------------------------------------


def _flow(d, N, tol, coeff_source, rtol, horizons):
    if N < 2:
        raise ValueError("N must be >= 2")

    def rhs(t, y):
        p = coeff_source(t, N - 1)
        if abs(p[0] - 1) > 1e-8:
            raise SeriesError(
                f"driver is not normalized (p(0, {t:.4g}) = {complex(p[0]):.6g}); "
                "renormalize it first"
            )
        f = TruncatedSeries(np.concatenate(([0, 1], y)), N)
        acc = TruncatedSeries.constant(0, N)
        power = f
        for m in range(1, N):
            power = power * f
            acc = acc + power * (p[m] * math.exp(-m * t))
        return list(-acc.coeffs[2:])

    marks = list(horizons)
    stops = sorted(set([b for b in d.breakpoints if b > 0] + marks))
    state = {"prev": None, "result": None}

    def on_stop(j, s, y):
        if s not in marks:
            return False
        cur = np.array(y)
        prev = state["prev"]
        if prev is not None and np.max(np.abs(cur - prev)) <= tol * max(1.0, np.max(np.abs(cur))):
            state["result"] = cur
            return True
        state["prev"] = cur
        return False

    status, _, y, _ = _fallback.dp45(rhs, [0j] * (N - 1), 0.0, stops, rtol, rtol * 1e-2,
                                     _fallback.H_INIT, on_stop=on_stop)
    _raise_for_status(status, "coefficient flow")
    if state["result"] is None:
        raise ConvergenceError("coefficients not stable by T = 80")
    return state["result"]


def coefficient_flow(d: HerglotzDriver, N, tol=1e-10, rtol=1e-12, horizons=HORIZONS):
    """Limits ``(a_2, ..., a_N)`` of the Taylor coefficients of ``e^t w(z, t)``.

    The driver's Taylor coefficients come from a DFT on ``|z| = 1/2`` with Cauchy
    error control; the series ODE is ``df/dt = -sum_m p_m(t) e^{-mt} f^{m+1}``.
    """
    if not d.normalized:
        raise SeriesError("coefficient_flow needs a normalized driver; use normalize_driver")

    def source(t, order):
        return taylor_dft(d, t, order).coeffs

    return _flow(d, N, tol, source, rtol, horizons)


def a2_a3_flow(d: HerglotzDriver, tol=1e-10, rtol=1e-12, horizons=HORIZONS):
    """Dedicated two-coefficient integrator using the driver's own Taylor expansion.

    ``a_2' = -e^{-t} p_1``, ``a_3' = -e^{-2t} p_2 - 2 e^{-t} p_1 a_2``.
    """
    if not d.normalized:
        raise SeriesError("a2_a3_flow needs a normalized driver")

    def rhs(t, y):
        p = d.taylor(t, 2).coeffs
        a2 = y[0]
        e = math.exp(-t)
        return [-e * p[1], -e * e * p[2] - 2 * e * p[1] * a2]

    marks = list(horizons)
    stops = sorted(set([b for b in d.breakpoints if b > 0] + marks))
    state = {"prev": None, "result": None}

    def on_stop(j, s, y):
        if s not in marks:
            return False
        cur = np.array(y)
        if state["prev"] is not None and np.max(np.abs(cur - state["prev"])) <= tol:
            state["result"] = cur
            return True
        state["prev"] = cur
        return False

    status, _, _, _ = _fallback.dp45(rhs, [0j, 0j], 0.0, stops, rtol, rtol * 1e-2,
                                     _fallback.H_INIT, on_stop=on_stop)
    _raise_for_status(status, "a2_a3_flow")
    if state["result"] is None:
        raise ConvergenceError("a2, a3 not stable by T = 80")
    return complex(state["result"][0]), complex(state["result"][1])
