"""Newton-Kantorovich outer iteration on the unknown initial values.

Plain undamped Newton: each pass evaluates the shooting residual and a
Jacobian (forward variational, backward adjoint, or central differences on
the residual itself) and applies the full correction.  Divergence from a
poor starting guess is reported, not patched over; an optional cap on the
correction norm exists for callers who want it, but is off by default.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import adjoint as _adjoint
from . import sensitivity as _sensitivity
from .bvp import BvProblem, residual
from .errors import IntegrationError
from .linalg import inf_norm, lu_solve
from .ode import IntegratorConfig, Trajectory

JacobianMode = Literal["forward", "adjoint", "finite_difference"]

# Relative perturbation for the finite-difference shooting Jacobian.
_FD_STEP = 1e-6


@dataclass(frozen=True)
class SolveOptions:
    jacobian_mode: JacobianMode = "forward"
    tol_residual: float = 1e-8
    tol_step: float = 1e-10
    max_iter: int = 25
    step_clamp: float | None = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self):
        if self.tol_residual <= 0 or self.tol_step <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.jacobian_mode not in ("forward", "adjoint", "finite_difference"):
            raise ValueError(f"unknown jacobian mode {self.jacobian_mode!r}")


@dataclass(frozen=True)
class IterationRecord:
    """One Newton pass: iterate, residual norm, and the step taken from it."""

    k: int
    c: np.ndarray
    residual_norm: float
    step_norm: float


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a shooting solve.

    ``converged`` is True only when a tolerance test stopped the iteration
    and the final residual is small; running out of iterations leaves the
    full trace behind with ``converged=False``.  ``initial_state`` and
    ``final_state`` are the boundary values x(a), x(b) of the last shot.
    """

    converged: bool
    c_final: np.ndarray
    iterations: tuple[IterationRecord, ...]
    final_trajectory: Trajectory
    initial_state: np.ndarray
    final_state: np.ndarray

    @property
    def newton_steps(self) -> int:
        """Number of corrections applied."""
        return sum(1 for rec in self.iterations if rec.step_norm > 0.0)

    @property
    def residual_norms(self) -> list[float]:
        return [rec.residual_norm for rec in self.iterations]


def fd_shooting_jacobian(
    problem: BvProblem, c, cfg: IntegratorConfig | None = None
) -> np.ndarray:
    """Central differences on the shooting residual; 2(n-m) integrations.

    Independent of both the variational and the adjoint route, which makes
    it the cross-check oracle for either.
    """
    c = np.asarray(c, dtype=float)
    k = c.shape[0]
    jac = np.empty((k, k))
    for i in range(k):
        h = _FD_STEP * (1.0 + abs(c[i]))
        cp = c.copy()
        cm = c.copy()
        cp[i] += h
        cm[i] -= h
        fp, _ = residual(problem, cp, cfg)
        fm, _ = residual(problem, cm, cfg)
        jac[:, i] = (fp - fm) / (2.0 * h)
    return jac


def _evaluate(problem, c, opts):
    """Residual, Jacobian and trajectory at ``c`` for the selected mode."""
    if opts.jacobian_mode == "forward":
        f, jac, traj = _sensitivity.forward_jacobian(problem, c, opts.integrator)
    elif opts.jacobian_mode == "adjoint":
        f, jac, traj, _ = _adjoint.adjoint_jacobian(problem, c, opts.integrator)
    else:
        f, traj = residual(problem, c, opts.integrator)
        jac = fd_shooting_jacobian(problem, c, opts.integrator)
    return f, jac, traj


def solve_bvp(problem: BvProblem, c0=None, opts: SolveOptions | None = None) -> SolveReport:
    """Iterate c <- c - J^-1 F until the residual or the step is small.

    ``c0=None`` starts from zero.  Integration failures propagate with the
    failing iterate attached (``exc.iteration``, ``exc.c``).
    """
    if opts is None:
        opts = SolveOptions()
    c = np.zeros(problem.n_unknowns) if c0 is None else np.asarray(c0, dtype=float).copy()

    history: list[IterationRecord] = []
    converged = False
    traj = None
    for k in range(opts.max_iter + 1):
        try:
            f, jac, traj = _evaluate(problem, c, opts)
        except IntegrationError as exc:
            exc.iteration = k
            exc.c = c.copy()
            raise
        rnorm = inf_norm(f)

        if rnorm <= opts.tol_residual:
            history.append(IterationRecord(k, c.copy(), rnorm, 0.0))
            converged = True
            break
        if k == opts.max_iter:
            history.append(IterationRecord(k, c.copy(), rnorm, 0.0))
            break

        dc = lu_solve(jac, -f)
        if opts.step_clamp is not None:
            snorm = inf_norm(dc)
            if snorm > opts.step_clamp:
                dc *= opts.step_clamp / snorm
        step = inf_norm(dc)
        history.append(IterationRecord(k, c.copy(), rnorm, step))
        small_step = step <= opts.tol_step * (1.0 + inf_norm(c))
        c = c + dc

        if small_step:
            # Step-based stop: confirm with one fresh residual at the new c.
            try:
                f, traj = residual(problem, c, opts.integrator)
            except IntegrationError as exc:
                exc.iteration = k + 1
                exc.c = c.copy()
                raise
            rnorm = inf_norm(f)
            history.append(IterationRecord(k + 1, c.copy(), rnorm, 0.0))
            converged = bool(np.isfinite(rnorm)) and rnorm <= 10.0 * opts.tol_residual
            break

    return SolveReport(
        converged=converged,
        c_final=c,
        iterations=tuple(history),
        final_trajectory=traj,
        initial_state=traj.initial_state.copy(),
        final_state=traj.final_state.copy(),
    )
