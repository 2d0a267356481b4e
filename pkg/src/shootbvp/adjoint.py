"""Shooting Jacobian by backward adjoint integration.

Solutions of p' = -J(t, x(t))^T p pair with solutions of the linearized
perturbation equation d' = J(t, x(t)) d so that <p(t), d(t)> is constant
in t.  Starting one adjoint column from each canonical basis vector at the
terminal time therefore transports terminal sensitivities back to t = a:
the matrix P(a) whose columns are those adjoint states satisfies

    dx(b)/dx(a) = P(a)^T,

and reading the rows belonging to the terminal-constrained components at
the free initial slots reproduces the shooting Jacobian.  The state enters
the adjoint right-hand side through interpolation of the stored forward
trajectory; the state is never re-integrated backward.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bvp import BvProblem, residual
from .linalg import basis_vector
from .ode import IntegratorConfig, RhsFunction, Trajectory, integrate
from .sensitivity import full_sensitivity


@dataclass(frozen=True)
class AdjointBundle:
    """Adjoint columns evaluated at the initial time.

    ``columns`` holds (terminal index j, p_j(a)) pairs in ascending j;
    ``assembled`` stacks the vectors as rows in the same order.
    """

    columns: tuple[tuple[int, np.ndarray], ...]
    assembled: np.ndarray


def adjoint_rhs(problem: BvProblem, state_traj: Trajectory) -> RhsFunction:
    """Right-hand side p' = -J(t, x(t))^T p along a stored state trajectory."""

    def rhs(t, p):
        x = state_traj.interpolate(t)
        return -(problem.jacobian_at(t, x).T @ p)

    return rhs


def linearized_rhs(problem: BvProblem, state_traj: Trajectory) -> RhsFunction:
    """Right-hand side d' = J(t, x(t)) d of the perturbation equation."""

    def rhs(t, d):
        x = state_traj.interpolate(t)
        return problem.jacobian_at(t, x) @ d

    return rhs


def _backward_columns(problem, state_traj, terminal_indices, cfg):
    a, b = problem.interval
    rhs = adjoint_rhs(problem, state_traj)
    out = []
    for j in terminal_indices:
        col = integrate(rhs, b, a, basis_vector(j, problem.n), cfg)
        out.append((j, col.final_state))
    return out


def adjoint_jacobian(
    problem: BvProblem, c, cfg: IntegratorConfig | None = None
) -> tuple[np.ndarray, np.ndarray, Trajectory, AdjointBundle]:
    """Residual plus Jacobian assembled from backward adjoint columns.

    One forward state pass, then one backward pass per terminal condition.
    Entry (r, i) of the Jacobian is the r-th adjoint column at the i-th
    free initial slot, evaluated at t = a.
    """
    f, traj = residual(problem, c, cfg)
    columns = _backward_columns(problem, traj, problem.terminal_indices, cfg)
    assembled = np.vstack([p for _, p in columns])
    jac = assembled[:, [i - 1 for i in problem.free_indices]]
    return f, jac, traj, AdjointBundle(columns=tuple(columns), assembled=assembled)


def flow_adjoint_deviation(problem: BvProblem, x0, cfg: IntegratorConfig | None = None) -> float:
    """Max deviation between P(a)^T and the forward flow derivative at t = b.

    Runs all n adjoint columns backward and the full variational system
    forward from ``x0``; the two matrices agree in exact arithmetic.
    """
    a, b = problem.interval
    x0 = np.asarray(x0, dtype=float)
    traj = integrate(problem.rhs, a, b, x0, cfg)

    columns = _backward_columns(problem, traj, range(1, problem.n + 1), cfg)
    p0_t = np.vstack([p for _, p in columns])
    flow = full_sensitivity(problem, x0, cfg)
    return float(np.max(np.abs(p0_t - flow)))


def bilinear_invariant(p_traj: Trajectory, d_traj: Trajectory, samples: int = 33) -> float:
    """Max drift of <p(t), d(t)> from its initial value over equispaced times.

    Both trajectories must cover the same interval; one adjoint, one
    linearized perturbation, both along the same base solution.
    """
    lo = min(p_traj.t_start, p_traj.t_end)
    hi = max(p_traj.t_start, p_traj.t_end)
    ref = float(p_traj.interpolate(lo) @ d_traj.interpolate(lo))
    drift = 0.0
    for t in np.linspace(lo, hi, samples):
        val = float(p_traj.interpolate(t) @ d_traj.interpolate(t))
        drift = max(drift, abs(val - ref))
    return drift


def correction_system(
    bundle: AdjointBundle, problem: BvProblem, x_terminal
) -> tuple[np.ndarray, np.ndarray]:
    """Linear system for the initial-value correction at the current shot.

    The matrix gathers each adjoint column at the free initial slots; the
    right side is the terminal mismatch with its sign flipped (target minus
    reached value).  Solving it yields the Newton update of the unknowns.
    """
    x_terminal = np.asarray(x_terminal, dtype=float)
    mat = bundle.assembled[:, [i - 1 for i in problem.free_indices]]
    rhs = np.array([target - x_terminal[j - 1] for j, target in problem.target_terminal])
    return mat, rhs
