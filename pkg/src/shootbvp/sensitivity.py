"""Shooting Jacobian by forward integration of the variational equations.

The derivative of the flow with respect to the unknown initial values
satisfies the linear matrix ODE S' = J(t, x) S along the state solution.
All columns ride in one augmented system with the state, sharing a single
step sequence, instead of one integration per column; slicing the
augmented state recovers the per-column picture.
"""

from __future__ import annotations

import numpy as np

from .bvp import BvProblem, embed_initial, select
from .ode import IntegratorConfig, RhsFunction, Trajectory, integrate


def augmented_rhs(problem: BvProblem, n_columns: int | None = None) -> RhsFunction:
    """Right-hand side of state + sensitivity columns, dimension n + n*k.

    The first n entries evolve by the problem rhs; the trailing n*k
    entries, read row-major as an (n, k) matrix S, evolve by J(t, x) S.
    ``n_columns`` defaults to the number of shooting unknowns.
    """
    n = problem.n
    k = problem.n_unknowns if n_columns is None else n_columns

    def rhs(t, z):
        x = z[:n]
        s = z[n:].reshape(n, k)
        out = np.empty_like(z)
        out[:n] = problem.rhs(t, x)
        out[n:] = (problem.jacobian_at(t, x) @ s).reshape(-1)
        return out

    return rhs


def _state_trajectory(aug: Trajectory, n: int) -> Trajectory:
    return Trajectory(t=aug.t, x=aug.x[:, :n], dx=aug.dx[:, :n], direction=aug.direction)


def forward_jacobian(
    problem: BvProblem, c, cfg: IntegratorConfig | None = None
) -> tuple[np.ndarray, np.ndarray, Trajectory]:
    """Residual and its Jacobian from one augmented pass over [a, b].

    Row r of the Jacobian is the sensitivity of terminal component j_r to
    each unknown initial value, both index lists ascending.
    """
    n, k = problem.n, problem.n_unknowns
    a, b = problem.interval

    z0 = np.zeros(n + n * k)
    z0[:n] = embed_initial(problem, c)
    s0 = z0[n:].reshape(n, k)
    for col, i in enumerate(problem.free_indices):
        s0[i - 1, col] = 1.0

    aug = integrate(augmented_rhs(problem), a, b, z0, cfg)
    xb = aug.final_state[:n]
    sb = aug.final_state[n:].reshape(n, k)

    f = select(problem.terminal_indices, xb) - problem.terminal_values
    jac = sb[[j - 1 for j in problem.terminal_indices], :]
    return f, jac, _state_trajectory(aug, n)


def full_sensitivity(problem: BvProblem, x0, cfg: IntegratorConfig | None = None) -> np.ndarray:
    """Flow derivative with respect to the whole initial state, at t = b.

    Integrates all n columns from the identity; entry (i, j) is the
    sensitivity of the i-th terminal component to the j-th initial one.
    """
    n = problem.n
    a, b = problem.interval
    x0 = np.asarray(x0, dtype=float)

    z0 = np.concatenate([x0, np.eye(n).reshape(-1)])
    aug = integrate(augmented_rhs(problem, n_columns=n), a, b, z0, cfg)
    return aug.final_state[n:].reshape(n, n)
