"""Adaptive explicit Runge-Kutta integration with dense trajectory storage.

The stepping kernel is the hot loop of the whole package, so it exists
twice: a Cython extension (``_dopri5``) and a pure-Python twin
(``_dopri5_py``).  The compiled one is picked at import time when present;
set ``SHOOTBVP_PURE_PYTHON=1`` to force the fallback.

Integration runs forward or backward in time directly with signed steps.
Accepted nodes keep both the state and its derivative, which makes cubic
Hermite interpolation available everywhere on the covered interval.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _dopri5_py
from .errors import (
    DimensionMismatchError,
    MaxStepsExceededError,
    NonFiniteStateError,
    StepSizeUnderflowError,
    TimeOutOfRangeError,
)

if os.environ.get("SHOOTBVP_PURE_PYTHON"):
    _kernel = _dopri5_py
    BACKEND = "python"
else:
    try:
        from . import _dopri5 as _kernel  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _kernel = _dopri5_py
        BACKEND = "python"

RhsFunction = Callable[[float, np.ndarray], np.ndarray]

# Fraction of the span used as the pre-scaling automatic first step.
_INITIAL_STEP_FRACTION = 0.01
_MIN_STEP_FRACTION = 1e-14


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and guards for one initial value integration.

    ``initial_step=None`` picks span/100 shrunk by the initial derivative
    magnitude; ``min_step=None`` means 1e-14 times the span.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    initial_step: float | None = None
    min_step: float | None = None
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.initial_step is not None and self.initial_step <= 0:
            raise ValueError("initial_step must be positive when given")
        if self.min_step is not None and self.min_step < 0:
            raise ValueError("min_step must be nonnegative")


@dataclass(frozen=True)
class Trajectory:
    """Dense record of an IVP solution: nodes (t, x, f(t, x)) in step order.

    Node times are strictly monotone in ``direction``.  Between nodes the
    state is reconstructed by the cubic Hermite interpolant on the
    bracketing pair, which is exact at the nodes themselves.
    """

    t: np.ndarray
    x: np.ndarray
    dx: np.ndarray
    direction: int

    @property
    def t_start(self) -> float:
        return float(self.t[0])

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    @property
    def initial_state(self) -> np.ndarray:
        return self.x[0]

    @property
    def final_state(self) -> np.ndarray:
        return self.x[-1]

    def interpolate(self, tq: float) -> np.ndarray:
        lo, hi = sorted((self.t_start, self.t_end))
        if not lo <= tq <= hi:
            # tolerate queries a few ulps past the span (endpoint roundoff)
            slop = 4.0 * max(np.spacing(abs(lo)), np.spacing(abs(hi)))
            if lo - slop <= tq <= hi + slop:
                tq = min(max(tq, lo), hi)
            else:
                raise TimeOutOfRangeError(f"t={tq} outside trajectory span [{lo}, {hi}]")

        # searchsorted needs ascending keys; negate for backward runs.
        keys = self.t if self.direction > 0 else -self.t
        q = tq if self.direction > 0 else -tq
        i = int(np.searchsorted(keys, q, side="right")) - 1
        i = min(max(i, 0), len(self.t) - 2)

        t0, t1 = self.t[i], self.t[i + 1]
        if tq == t0:
            return self.x[i].copy()
        if tq == t1:
            return self.x[i + 1].copy()

        dt = t1 - t0
        s = (tq - t0) / dt
        s2, s3 = s * s, s * s * s
        h00 = 2.0 * s3 - 3.0 * s2 + 1.0
        h10 = s3 - 2.0 * s2 + s
        h01 = -2.0 * s3 + 3.0 * s2
        h11 = s3 - s2
        return h00 * self.x[i] + h10 * dt * self.dx[i] + h01 * self.x[i + 1] + h11 * dt * self.dx[i + 1]

    def __call__(self, tq: float) -> np.ndarray:
        return self.interpolate(tq)

    def __len__(self) -> int:
        return len(self.t)


def integrate(
    rhs: RhsFunction,
    t_start: float,
    t_end: float,
    x0,
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Integrate ``dx/dt = rhs(t, x)`` from ``t_start`` to ``t_end``.

    ``t_end < t_start`` integrates backward.  Local error per step is held
    to ``(rtol, atol)`` by the embedded 4th-order estimate.
    """
    if cfg is None:
        cfg = IntegratorConfig()
    if t_start == t_end:
        raise ValueError("t_start and t_end must differ")

    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1:
        raise DimensionMismatchError(f"initial state must be a vector, got shape {x0.shape}")
    if not np.all(np.isfinite(x0)):
        raise NonFiniteStateError("initial state contains NaN/inf", t=t_start)

    f0 = np.asarray(rhs(t_start, x0), dtype=float)
    if f0.shape != x0.shape:
        raise DimensionMismatchError(
            f"rhs returned shape {f0.shape} for state of shape {x0.shape}"
        )
    if not np.all(np.isfinite(f0)):
        raise NonFiniteStateError("rhs returned NaN/inf at the initial state", t=t_start)

    span = abs(t_end - t_start)
    if cfg.initial_step is not None:
        h0 = abs(cfg.initial_step)
    else:
        speed = float(np.max(np.abs(f0))) / (1.0 + float(np.max(np.abs(x0))))
        h0 = _INITIAL_STEP_FRACTION * span / max(1.0, speed)
    min_step = cfg.min_step if cfg.min_step is not None else _MIN_STEP_FRACTION * span

    ts, xs, fs, status, t_reached = _kernel.integrate_raw(
        rhs, float(t_start), float(t_end), x0, cfg.rtol, cfg.atol, h0, min_step, cfg.max_steps
    )
    if status == _dopri5_py.STATUS_STEP_UNDERFLOW:
        raise StepSizeUnderflowError(
            f"step size fell below {min_step:.3e} at t={t_reached!r}", t=t_reached
        )
    if status == _dopri5_py.STATUS_MAX_STEPS:
        raise MaxStepsExceededError(
            f"exceeded {cfg.max_steps} step attempts at t={t_reached!r}", t=t_reached
        )
    if status == _dopri5_py.STATUS_NON_FINITE:
        raise NonFiniteStateError(f"rhs returned NaN/inf near t={t_reached!r}", t=t_reached)
    return Trajectory(t=ts, x=xs, dx=fs, direction=1 if t_end > t_start else -1)


def interpolate(traj: Trajectory, tq: float) -> np.ndarray:
    """State of ``traj`` at time ``tq`` (cubic Hermite between nodes)."""
    return traj.interpolate(tq)
