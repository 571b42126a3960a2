"""Pure-Python integration kernel.

Mirrors ``_kernels.pyx`` step for step (same Dormand-Prince tableau, same PI
controller, same stopping rules) so both backends return the same numbers up to
rounding.  Also serves every Custom driver, which the compiled kernel cannot see.

State integrated for a chain started at time ``t`` from point ``zeta``::

    u = exp(Q(s) - Q(t)) * w(s),   q = Q(s) - Q(t),   Q(s) = int_0^s p(0, r) dr
    du/ds = u * (p(0, s) - p(w, s)),   dq/ds = p(0, s),   w = u * exp(-q)

``exp(Q(t)) * u(s)`` converges to the chain element ``f_t(zeta)`` as s grows.
"""

import cmath
import math

import numpy as np

CONSTANT_POWER = 0
EXTREMAL_A3 = 1
BLASCHKE = 2

OK = 0
NOT_CONVERGED = 1
STEP_UNDERFLOW = 2
NON_MONOTONE = 3

BOUNDARY_STEP = 1e-6
H_INIT = 1e-2
MONOTONE_SLACK = 1e-12

# Dormand-Prince 5(4)
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9


def builtin_driver(spec):
    """Return scalar ``p(z, t)`` and ``p(0, t)`` closures for a kernel spec tuple."""
    code, k, phase, n, zeros, t0 = spec[:6]
    zeros = [complex(a) for a in zeros]
    if code == CONSTANT_POWER:
        c = k * cmath.exp(-1j * phase)

        def p(z, t):
            x = c * z**n
            return (1 - x) / (1 + x)

        def p0(t):
            return 1.0 + 0j

    elif code == EXTREMAL_A3:
        rot = cmath.exp(1j * phase)

        def p(z, t):
            z = rot * z
            if t < t0:
                s = math.exp(t - t0)
                return (1 - k * z * z + (1 - k) * s * z) / (1 + k * z * z + (1 + k) * s * z)
            return (1 - k * z) / (1 + k * z)

        def p0(t):
            return 1.0 + 0j

    elif code == BLASCHKE:
        rot = cmath.exp(1j * phase)

        def p(z, t):
            e = math.exp(-t)
            psi = rot
            for a in zeros:
                b = e * a
                psi *= (z - b) / (1 - b.conjugate() * z)
            x = k * psi
            return (1 + x) / (1 - x)

        def p0(t):
            return p(0j, t)

    else:
        raise ValueError(f"unknown driver code {code}")
    return p, p0


def _error_norm(y, ynew, err, rtol, atol):
    m = 0.0
    for i in range(len(y)):
        sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
        v = abs(err[i]) / sc
        if v > m:
            m = v
    return m


def dp45(rhs, y, s, stops, rtol, atol, h, on_stop=None, on_step=None, monitor=None):
    """Integrate ``y' = rhs(s, y)`` through the increasing times in ``stops``.

    Every stop is hit exactly.  ``on_stop(j, s, y)`` may return True to end early.
    ``monitor(y_old, y_new)`` returns False to flag a monotonicity violation.
    Returns ``(status, s, y, nsteps)``.
    """
    dim = len(y)
    y = list(y)
    f1 = rhs(s, y)
    err_prev = 1e-4
    rejected = False
    nsteps = 0
    for j, s_stop in enumerate(stops):
        if s_stop <= s:
            continue
        while s < s_stop:
            hmin = 1e-13 * max(1.0, abs(s))
            if h < hmin:
                return STEP_UNDERFLOW, s, y, nsteps
            h_prop = h
            last = False
            if s + h >= s_stop:
                h = s_stop - s
                last = True
            k1 = f1
            yt = [y[i] + h * A21 * k1[i] for i in range(dim)]
            k2 = rhs(s + C2 * h, yt)
            yt = [y[i] + h * (A31 * k1[i] + A32 * k2[i]) for i in range(dim)]
            k3 = rhs(s + C3 * h, yt)
            yt = [y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]) for i in range(dim)]
            k4 = rhs(s + C4 * h, yt)
            yt = [y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]) for i in range(dim)]
            k5 = rhs(s + C5 * h, yt)
            yt = [
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
                for i in range(dim)
            ]
            s_new = s_stop if last else s + h
            k6 = rhs(s + h, yt)
            ynew = [
                y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
                for i in range(dim)
            ]
            k7 = rhs(s_new, ynew)
            e = [
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
                for i in range(dim)
            ]
            en = _error_norm(y, ynew, e, rtol, atol)
            if en <= 1.0:
                if monitor is not None and not monitor(y, ynew):
                    return NON_MONOTONE, s, y, nsteps
                nsteps += 1
                if en == 0.0:
                    fac = 10.0
                else:
                    fac = 0.9 * en ** (-0.7 / 5) * err_prev ** (0.4 / 5)
                    fac = min(10.0, max(0.2, fac))
                if rejected:
                    fac = min(fac, 1.0)
                err_prev = max(en, 1e-4)
                rejected = False
                y = ynew
                f1 = k7
                if last:
                    h = max(h_prop, h * fac)
                else:
                    h = h * fac
                s = s_new
                if on_step is not None:
                    on_step(s, y)
            else:
                h = h * max(0.2, 0.9 * en ** (-0.2))
                rejected = True
        # re-evaluate after a stop: breakpoints may change the right-hand side
        f1 = rhs(s, y)
        if on_stop is not None and on_stop(j, s, y):
            return OK, s, y, nsteps
    return OK, s, y, nsteps


def _chain_rhs(p, p0):
    def rhs(s, y):
        u, q = y
        w = u * cmath.exp(-q)
        a = p0(s)
        return [u * (a - p(w, s)), a]

    return rhs


def _monotone(y_old, y_new):
    wo = abs(y_old[0]) * math.exp(-y_old[1].real)
    wn = abs(y_new[0]) * math.exp(-y_new[1].real)
    return wn <= wo * (1 + MONOTONE_SLACK)


def _boundary_start(p, p0, t, zeta):
    """One implicit Euler step of size BOUNDARY_STEP from a point on the unit circle."""
    h = BOUNDARY_STEP
    th = t + h
    w = zeta
    for _ in range(50):
        w_next = zeta / (1 + h * p(w, th))
        if abs(w_next - w) <= 1e-17:
            w = w_next
            break
        w = w_next
    q = h * p0(th)
    return th, [w * cmath.exp(q), q]


def origin_integral(p0, t, rtol, atol, breakpoints=()):
    """``Q(t) = int_0^t p(0, s) ds`` by the same integrator."""
    if t <= 0:
        return 0j
    stops = sorted(b for b in breakpoints if 0 < b < t) + [t]
    status, _, y, _ = dp45(lambda s, y: [p0(s)], [0j], 0.0, stops, rtol, atol, H_INIT)
    if status != OK:
        raise ArithmeticError(f"origin integral failed with status {status}")
    return y[0]


def chain_limit(p, p0, t, zeta, q_t, horizons, rtol, atol, tol, breakpoints=()):
    """Return ``(value, status, nsteps)`` for ``f_t(zeta)``; ``q_t`` is ``Q(t)``."""
    zeta = complex(zeta)
    if abs(zeta) >= 1 - 1e-12:
        s0, y0 = _boundary_start(p, p0, t, zeta)
    else:
        s0, y0 = t, [zeta, 0j]
    marks = [t + H for H in horizons]
    stops = sorted(set([b for b in breakpoints if b > s0] + marks))
    mark_idx = {i for i, s in enumerate(stops) if s in marks}
    prev = [None]
    result = [None]

    def on_stop(j, s, y):
        if j not in mark_idx:
            return False
        u = y[0]
        if prev[0] is not None and abs(u - prev[0]) <= tol * max(1.0, abs(u)):
            result[0] = u
            return True
        prev[0] = u
        return False

    status, s, y, nsteps = dp45(
        _chain_rhs(p, p0), y0, s0, stops, rtol, atol, H_INIT, on_stop=on_stop, monitor=_monotone
    )
    if status != OK:
        return complex("nan"), status, nsteps
    if result[0] is None:
        return cmath.exp(q_t) * y[0], NOT_CONVERGED, nsteps
    return cmath.exp(q_t) * result[0], OK, nsteps


def chain_limits(spec, ts, zs, horizons, rtol, atol, tol):
    """Batch evaluation for a built-in driver spec; same contract as the compiled kernel."""
    p, p0 = builtin_driver(spec)
    t0 = spec[5]
    normalized = spec[6]
    bps = (t0,) if spec[0] == EXTREMAL_A3 else ()
    ts = np.asarray(ts, dtype=float)
    zs = np.asarray(zs, dtype=complex)
    out = np.empty(len(zs), dtype=complex)
    status = np.zeros(len(zs), dtype=np.int64)
    nsteps = np.zeros(len(zs), dtype=np.int64)
    for i in range(len(zs)):
        t = float(ts[i])
        q_t = complex(t) if normalized else origin_integral(p0, t, rtol, atol, bps)
        out[i], status[i], nsteps[i] = chain_limit(
            p, p0, t, zs[i], q_t, horizons, rtol, atol, tol, bps
        )
    return out, status, nsteps


def trajectory(p, p0, z0, T, rtol, atol, breakpoints=()):
    """Accepted-step samples ``(ts, ws, status)`` of ``dw/dt = -w p(w, t)`` on ``[0, T]``."""
    z0 = complex(z0)
    if abs(z0) >= 1 - 1e-12:
        s0, y0 = _boundary_start(p, p0, 0.0, z0)
        ts, ws = [0.0, s0], [z0, y0[0] * cmath.exp(-y0[1])]
    else:
        s0, y0 = 0.0, [z0, 0j]
        ts, ws = [0.0], [z0]

    def on_step(s, y):
        ts.append(s)
        ws.append(y[0] * cmath.exp(-y[1]))

    stops = sorted(set([b for b in breakpoints if s0 < b < T] + [T]))
    status, _, _, _ = dp45(
        _chain_rhs(p, p0), y0, s0, stops, rtol, atol, H_INIT, on_step=on_step, monitor=_monotone
    )
    return np.array(ts), np.array(ws, dtype=complex), status
