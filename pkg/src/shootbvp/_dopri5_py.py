"""Pure-Python adaptive Dormand-Prince 5(4) stepping kernel.

Fallback twin of the compiled kernel in ``_dopri5.pyx``; both implement
the same loop and must stay in lockstep.  The embedded 4th-order error
estimate drives proportional step control with safety 0.9 and the step
factor clamped to [0.2, 5.0].  The first-same-as-last property supplies
the derivative stored at every accepted node.
"""

from __future__ import annotations

import numpy as np

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_MAX_STEPS = 2
STATUS_NON_FINITE = 3

# Dormand & Prince 1980, RK5(4)7M.
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# 5th-order minus embedded 4th-order weights.
E1, E3, E4, E5, E6, E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


def integrate_raw(rhs, t0, t1, x0, rtol, atol, h0, min_step, max_steps):
    """Step from ``t0`` to ``t1``; returns ``(ts, xs, fs, status, t_reached)``.

    On a non-OK status the arrays hold the nodes accepted so far and
    ``t_reached`` is where the attempt stalled.
    """
    n = x0.shape[0]
    direction = 1.0 if t1 > t0 else -1.0

    t = t0
    x = x0.copy()
    k1 = np.asarray(rhs(t, x), dtype=float)
    if not np.all(np.isfinite(k1)):
        return (np.array([t0]), x0.reshape(1, n).copy(), np.zeros((1, n)), STATUS_NON_FINITE, t0)

    ts = [t0]
    xs = [x.copy()]
    fs = [k1.copy()]

    h = direction * min(abs(h0), abs(t1 - t0))
    attempts = 0

    while True:
        attempts += 1
        if attempts > max_steps:
            return _pack(ts, xs, fs, STATUS_MAX_STEPS, t)

        last = (t + h - t1) * direction >= 0.0
        h_used = (t1 - t) if last else h
        # t + h_used can land an ulp past t1; pin the end-of-step stage time
        t_end = t1 if last else t + h_used

        k2 = np.asarray(rhs(t + C2 * h_used, x + h_used * (A21 * k1)), dtype=float)
        k3 = np.asarray(rhs(t + C3 * h_used, x + h_used * (A31 * k1 + A32 * k2)), dtype=float)
        k4 = np.asarray(
            rhs(t + C4 * h_used, x + h_used * (A41 * k1 + A42 * k2 + A43 * k3)), dtype=float
        )
        k5 = np.asarray(
            rhs(t + C5 * h_used, x + h_used * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)),
            dtype=float,
        )
        k6 = np.asarray(
            rhs(
                t_end,
                x + h_used * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
            ),
            dtype=float,
        )
        x_new = x + h_used * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        k7 = np.asarray(rhs(t_end, x_new), dtype=float)

        stages = (k2, k3, k4, k5, k6, k7)
        if any(not np.all(np.isfinite(k)) for k in stages):
            return _pack(ts, xs, fs, STATUS_NON_FINITE, t)

        err_vec = h_used * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        scale = atol + rtol * np.maximum(np.abs(x), np.abs(x_new))
        with np.errstate(over="ignore", invalid="ignore"):
            ratio = err_vec / scale
            err = float(np.sqrt(np.mean(ratio * ratio)))
        if not np.isfinite(err) or not np.all(np.isfinite(x_new)):
            err = np.inf

        if err <= 1.0:
            t = t_end
            x = x_new
            k1 = k7
            ts.append(t)
            xs.append(x.copy())
            fs.append(k1.copy())
            if last:
                return _pack(ts, xs, fs, STATUS_OK, t)
            factor = MAX_FACTOR if err == 0.0 else min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * err**-0.2))
            h = h_used * factor
        else:
            factor = MIN_FACTOR if err == np.inf else max(MIN_FACTOR, min(1.0, SAFETY * err**-0.2))
            h = h_used * factor

        if abs(h) < min_step:
            return _pack(ts, xs, fs, STATUS_STEP_UNDERFLOW, t)


def _pack(ts, xs, fs, status, t_reached):
    return np.array(ts), np.array(xs), np.array(fs), status, t_reached
