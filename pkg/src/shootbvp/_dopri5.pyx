# cython: language_level=3
"""Compiled adaptive Dormand-Prince 5(4) stepping kernel.

Twin of ``_dopri5_py``; the two must implement the same loop, including
constants and update order, so that either backend can serve any caller.
Stage combinations, the error norm and step control run in C; only the
right-hand side callback crosses back into Python.
"""

import numpy as np

from libc.math cimport fabs, isfinite, pow, sqrt

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_MAX_STEPS = 2
STATUS_NON_FINITE = 3

cdef double C2 = 1.0 / 5.0
cdef double C3 = 3.0 / 10.0
cdef double C4 = 4.0 / 5.0
cdef double C5 = 8.0 / 9.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 5.0


cdef bint _eval(object rhs, double t, object x_arr, double[::1] out) except? True:
    """Call the Python rhs and copy its output; True when non-finite."""
    cdef double[::1] res = np.ascontiguousarray(rhs(t, x_arr), dtype=np.float64)
    cdef Py_ssize_t i, n = out.shape[0]
    cdef bint bad = False
    for i in range(n):
        out[i] = res[i]
        if not isfinite(res[i]):
            bad = True
    return bad


def integrate_raw(object rhs, double t0, double t1, object x0, double rtol,
                  double atol, double h0, double min_step, long max_steps):
    """Step from ``t0`` to ``t1``; returns ``(ts, xs, fs, status, t_reached)``."""
    cdef Py_ssize_t n = len(x0)
    cdef double direction = 1.0 if t1 > t0 else -1.0

    x_arr = np.array(x0, dtype=np.float64)
    stage_arr = np.empty(n, dtype=np.float64)
    xnew_arr = np.empty(n, dtype=np.float64)
    k1_arr = np.empty(n, dtype=np.float64)
    k2_arr = np.empty(n, dtype=np.float64)
    k3_arr = np.empty(n, dtype=np.float64)
    k4_arr = np.empty(n, dtype=np.float64)
    k5_arr = np.empty(n, dtype=np.float64)
    k6_arr = np.empty(n, dtype=np.float64)
    k7_arr = np.empty(n, dtype=np.float64)

    cdef double[::1] x = x_arr
    cdef double[::1] stage = stage_arr
    cdef double[::1] x_new = xnew_arr
    cdef double[::1] k1 = k1_arr
    cdef double[::1] k2 = k2_arr
    cdef double[::1] k3 = k3_arr
    cdef double[::1] k4 = k4_arr
    cdef double[::1] k5 = k5_arr
    cdef double[::1] k6 = k6_arr
    cdef double[::1] k7 = k7_arr

    cdef double t = t0
    cdef double h, h_used, t_end, err, ratio, scale, e_i, factor, ax, axn
    cdef long attempts = 0
    cdef bint last, bad
    cdef Py_ssize_t i

    if _eval(rhs, t, x_arr, k1):
        return (np.array([t0]), x_arr.reshape(1, n).copy(), np.zeros((1, n)),
                STATUS_NON_FINITE, t0)

    ts = [t0]
    xs = [x_arr.copy()]
    fs = [np.asarray(k1).copy()]

    h = direction * min(fabs(h0), fabs(t1 - t0))

    while True:
        attempts += 1
        if attempts > max_steps:
            return _pack(ts, xs, fs, STATUS_MAX_STEPS, t)

        last = (t + h - t1) * direction >= 0.0
        h_used = (t1 - t) if last else h
        # t + h_used can land an ulp past t1; pin the end-of-step stage time
        t_end = t1 if last else t + h_used

        bad = False
        for i in range(n):
            stage[i] = x[i] + h_used * (A21 * k1[i])
        bad |= _eval(rhs, t + C2 * h_used, stage_arr.copy(), k2)
        for i in range(n):
            stage[i] = x[i] + h_used * (A31 * k1[i] + A32 * k2[i])
        bad |= _eval(rhs, t + C3 * h_used, stage_arr.copy(), k3)
        for i in range(n):
            stage[i] = x[i] + h_used * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        bad |= _eval(rhs, t + C4 * h_used, stage_arr.copy(), k4)
        for i in range(n):
            stage[i] = x[i] + h_used * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        bad |= _eval(rhs, t + C5 * h_used, stage_arr.copy(), k5)
        for i in range(n):
            stage[i] = x[i] + h_used * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
        bad |= _eval(rhs, t_end, stage_arr.copy(), k6)
        for i in range(n):
            x_new[i] = x[i] + h_used * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
        bad |= _eval(rhs, t_end, xnew_arr.copy(), k7)

        if bad:
            return _pack(ts, xs, fs, STATUS_NON_FINITE, t)

        err = 0.0
        for i in range(n):
            e_i = h_used * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            ax = fabs(x[i])
            axn = fabs(x_new[i])
            scale = atol + rtol * (ax if ax > axn else axn)
            ratio = e_i / scale
            err += ratio * ratio
            if not isfinite(x_new[i]):
                err = float("inf")
                break
        if isfinite(err):
            err = sqrt(err / n)
        else:
            err = float("inf")

        if err <= 1.0:
            t = t_end
            for i in range(n):
                x[i] = x_new[i]
                k1[i] = k7[i]
            ts.append(t)
            xs.append(x_arr.copy())
            fs.append(k1_arr.copy())
            if last:
                return _pack(ts, xs, fs, STATUS_OK, t)
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * pow(err, -0.2)
                if factor > MAX_FACTOR:
                    factor = MAX_FACTOR
                elif factor < MIN_FACTOR:
                    factor = MIN_FACTOR
            h = h_used * factor
        else:
            if err == float("inf"):
                factor = MIN_FACTOR
            else:
                factor = SAFETY * pow(err, -0.2)
                if factor > 1.0:
                    factor = 1.0
                elif factor < MIN_FACTOR:
                    factor = MIN_FACTOR
            h = h_used * factor

        if fabs(h) < min_step:
            return _pack(ts, xs, fs, STATUS_STEP_UNDERFLOW, t)


def _pack(ts, xs, fs, status, t_reached):
    return np.array(ts), np.array(xs), np.array(fs), status, t_reached
