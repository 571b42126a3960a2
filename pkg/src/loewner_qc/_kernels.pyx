# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled chain-limit kernel for the built-in driver families.

Same algorithm as ``_fallback.chain_limits``: Dormand-Prince 5(4), PI step
control, forced stops at breakpoints and horizons, implicit Euler entry step for
boundary points, monotonicity check on |w| at every accepted step.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, cos, sin, fabs, fmax, fmin, pow, sqrt

cnp.import_array()

from libc.complex cimport cabs, cexp, conj, creal

cdef enum:
    CONSTANT_POWER = 0
    EXTREMAL_A3 = 1
    BLASCHKE = 2
    OK = 0
    NOT_CONVERGED = 1
    STEP_UNDERFLOW = 2
    NON_MONOTONE = 3
    MAX_STOPS = 64

cdef double BOUNDARY_STEP = 1e-6
cdef double H_INIT = 1e-2
cdef double MONOTONE_SLACK = 1e-12

cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40
cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9


cdef struct Driver:
    int code
    double k
    double complex rot       # exp(i*phase) (ExtremalA3, Blaschke)
    double complex c         # k*exp(-i*phase) (ConstantPower)
    int n
    int nzeros
    double complex *zeros
    double t0


cdef inline double complex ipow(double complex z, int n) nogil:
    cdef double complex r = 1.0
    cdef int i
    for i in range(n):
        r = r * z
    return r


cdef inline double complex p_eval(Driver *d, double complex z, double t) nogil:
    cdef double complex x, psi, b
    cdef double s, e
    cdef int j
    if d.code == CONSTANT_POWER:
        x = d.c * ipow(z, d.n)
        return (1 - x) / (1 + x)
    elif d.code == EXTREMAL_A3:
        z = d.rot * z
        if t < d.t0:
            s = exp(t - d.t0)
            return (1 - d.k * z * z + (1 - d.k) * s * z) / (1 + d.k * z * z + (1 + d.k) * s * z)
        return (1 - d.k * z) / (1 + d.k * z)
    else:
        e = exp(-t)
        psi = d.rot
        for j in range(d.nzeros):
            b = e * d.zeros[j]
            psi = psi * (z - b) / (1 - conj(b) * z)
        x = d.k * psi
        return (1 + x) / (1 - x)


cdef inline double complex p_origin(Driver *d, double t) nogil:
    if d.code == BLASCHKE:
        return p_eval(d, 0.0, t)
    return 1.0


cdef inline void chain_rhs(Driver *d, int mode, double s, double complex *y, double complex *out) nogil:
    # mode 0: (u, q) chain system; mode 1: scalar origin integral dq/ds = p(0, s)
    cdef double complex a, w
    a = p_origin(d, s)
    if mode == 1:
        out[0] = a
        return
    w = y[0] * cexp(-y[1])
    out[0] = y[0] * (a - p_eval(d, w, s))
    out[1] = a


cdef inline double wmod(double complex *y) nogil:
    return cabs(y[0]) * exp(-creal(y[1]))


cdef int dp45(Driver *d, int mode, int dim, double complex *y, double *s_io,
              double *stops, int nstops, int *is_mark, double rtol, double atol,
              double tol, double complex *result, int *converged, long *nsteps) nogil:
    cdef double complex k1[2]
    cdef double complex k2[2]
    cdef double complex k3[2]
    cdef double complex k4[2]
    cdef double complex k5[2]
    cdef double complex k6[2]
    cdef double complex k7[2]
    cdef double complex yt[2]
    cdef double complex ynew[2]
    cdef double complex prev = 0
    cdef int have_prev = 0
    cdef double s = s_io[0]
    cdef double h = H_INIT, h_prop, hmin, s_stop, s_new, en, v, sc, fac
    cdef double err_prev = 1e-4
    cdef int rejected = 0, last, i, j
    converged[0] = 0
    chain_rhs(d, mode, s, y, k1)
    for j in range(nstops):
        s_stop = stops[j]
        if s_stop <= s:
            continue
        while s < s_stop:
            hmin = 1e-13 * fmax(1.0, fabs(s))
            if h < hmin:
                s_io[0] = s
                return STEP_UNDERFLOW
            h_prop = h
            last = 0
            if s + h >= s_stop:
                h = s_stop - s
                last = 1
            for i in range(dim):
                yt[i] = y[i] + h * A21 * k1[i]
            chain_rhs(d, mode, s + C2 * h, yt, k2)
            for i in range(dim):
                yt[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
            chain_rhs(d, mode, s + C3 * h, yt, k3)
            for i in range(dim):
                yt[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            chain_rhs(d, mode, s + C4 * h, yt, k4)
            for i in range(dim):
                yt[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            chain_rhs(d, mode, s + C5 * h, yt, k5)
            for i in range(dim):
                yt[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
            if last:
                s_new = s_stop
            else:
                s_new = s + h
            chain_rhs(d, mode, s + h, yt, k6)
            for i in range(dim):
                ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
            chain_rhs(d, mode, s_new, ynew, k7)
            en = 0.0
            for i in range(dim):
                sc = atol + rtol * fmax(cabs(y[i]), cabs(ynew[i]))
                v = cabs(h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])) / sc
                if v > en:
                    en = v
            if en <= 1.0:
                if mode == 0 and not (wmod(ynew) <= wmod(y) * (1 + MONOTONE_SLACK)):
                    s_io[0] = s
                    return NON_MONOTONE
                nsteps[0] += 1
                if en == 0.0:
                    fac = 10.0
                else:
                    fac = 0.9 * pow(en, -0.7 / 5) * pow(err_prev, 0.4 / 5)
                    fac = fmin(10.0, fmax(0.2, fac))
                if rejected:
                    fac = fmin(fac, 1.0)
                err_prev = fmax(en, 1e-4)
                rejected = 0
                for i in range(dim):
                    y[i] = ynew[i]
                    k1[i] = k7[i]
                if last:
                    h = fmax(h_prop, h * fac)
                else:
                    h = h * fac
                s = s_new
            else:
                h = h * fmax(0.2, 0.9 * pow(en, -0.2))
                rejected = 1
        chain_rhs(d, mode, s, y, k1)
        if is_mark != NULL and is_mark[j]:
            if have_prev and cabs(y[0] - prev) <= tol * fmax(1.0, cabs(y[0])):
                result[0] = y[0]
                converged[0] = 1
                s_io[0] = s
                return OK
            prev = y[0]
            have_prev = 1
    s_io[0] = s
    return OK


cdef double complex origin_integral(Driver *d, double t, double rtol, double atol, int *status) nogil:
    cdef double complex y[2]
    cdef double stops[2]
    cdef int nst = 0, conv
    cdef double s = 0.0
    cdef double complex dummy
    cdef long ns = 0
    y[0] = 0
    y[1] = 0
    if t <= 0:
        status[0] = OK
        return 0
    if d.code == EXTREMAL_A3 and 0 < d.t0 < t:
        stops[nst] = d.t0
        nst += 1
    stops[nst] = t
    nst += 1
    status[0] = dp45(d, 1, 1, y, &s, stops, nst, NULL, rtol, atol, 0.0, &dummy, &conv, &ns)
    return y[0]


cdef int chain_one(Driver *d, double t, double complex zeta, double complex q_t,
                   double *horizons, int nh, double rtol, double atol, double tol,
                   double complex *out, long *nsteps) nogil:
    cdef double complex y[2]
    cdef double stops[MAX_STOPS]
    cdef int is_mark[MAX_STOPS]
    cdef double s0, th, hb, x
    cdef double complex w, w_next, q, res = 0
    cdef int it, nst = 0, i, j, status, conv = 0, inserted
    if cabs(zeta) >= 1 - 1e-12:
        hb = BOUNDARY_STEP
        th = t + hb
        w = zeta
        for it in range(50):
            w_next = zeta / (1 + hb * p_eval(d, w, th))
            if cabs(w_next - w) <= 1e-17:
                w = w_next
                break
            w = w_next
        q = hb * p_origin(d, th)
        s0 = th
        y[0] = w * cexp(q)
        y[1] = q
    else:
        s0 = t
        y[0] = zeta
        y[1] = 0
    # sorted union of breakpoint and horizon marks (mirrors the Python set/sort)
    for i in range(nh):
        stops[nst] = t + horizons[i]
        is_mark[nst] = 1
        nst += 1
    if d.code == EXTREMAL_A3 and d.t0 > s0:
        inserted = 0
        for i in range(nst):
            if stops[i] == d.t0:
                inserted = 1
        if not inserted:
            stops[nst] = d.t0
            is_mark[nst] = 0
            nst += 1
    for i in range(1, nst):
        j = i
        while j > 0 and stops[j - 1] > stops[j]:
            x = stops[j]; stops[j] = stops[j - 1]; stops[j - 1] = x
            it = is_mark[j]; is_mark[j] = is_mark[j - 1]; is_mark[j - 1] = it
            j -= 1
    status = dp45(d, 0, 2, y, &s0, stops, nst, is_mark, rtol, atol, tol, &res, &conv, nsteps)
    if status != OK:
        out[0] = 0.0
        return status
    if not conv:
        out[0] = cexp(q_t) * y[0]
        return NOT_CONVERGED
    out[0] = cexp(q_t) * res
    return OK


def chain_limits(spec, ts, zs, horizons, double rtol, double atol, double tol):
    """Batch chain limits ``f_t(zeta)`` for a built-in driver spec tuple.

    Returns ``(values, status, nsteps)`` arrays; see ``_fallback.chain_limits``.
    """
    cdef Driver d
    cdef cnp.ndarray[double, ndim=1] t_arr = np.ascontiguousarray(ts, dtype=np.float64)
    cdef cnp.ndarray[double complex, ndim=1] z_arr = np.ascontiguousarray(zs, dtype=np.complex128)
    cdef cnp.ndarray[double, ndim=1] h_arr = np.ascontiguousarray(horizons, dtype=np.float64)
    cdef cnp.ndarray[double complex, ndim=1] zeros = np.ascontiguousarray(
        np.asarray(spec[4], dtype=np.complex128).reshape(-1))
    cdef Py_ssize_t npts = z_arr.shape[0], i
    cdef cnp.ndarray[double complex, ndim=1] out = np.empty(npts, dtype=np.complex128)
    cdef cnp.ndarray[long, ndim=1] status = np.zeros(npts, dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] nsteps = np.zeros(npts, dtype=np.int64)
    cdef int normalized = bool(spec[6])
    cdef int nh = h_arr.shape[0]
    cdef int qstat
    cdef double complex q_t
    cdef double phase = spec[2]
    if nh > MAX_STOPS - 2:
        raise ValueError("too many horizons")
    d.code = spec[0]
    d.k = spec[1]
    d.rot = cos(phase) + 1j * sin(phase)
    d.c = d.k * (cos(phase) - 1j * sin(phase))
    d.n = spec[3]
    d.nzeros = zeros.shape[0]
    d.zeros = <double complex *> zeros.data if d.nzeros > 0 else NULL
    d.t0 = spec[5]
    with nogil:
        for i in range(npts):
            if normalized:
                q_t = t_arr[i]
            else:
                q_t = origin_integral(&d, t_arr[i], rtol, atol, &qstat)
                if qstat != OK:
                    status[i] = qstat
                    out[i] = 0.0
                    continue
            status[i] = chain_one(&d, t_arr[i], z_arr[i], q_t, &h_arr[0], nh,
                                  rtol, atol, tol, &out[i], &nsteps[i])
    for i in range(npts):
        if status[i] == STEP_UNDERFLOW or status[i] == NON_MONOTONE:
            out[i] = complex("nan")
    return out, status, nsteps
