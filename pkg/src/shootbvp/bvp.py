"""Two-point boundary value problems with separated, explicit conditions.

A problem fixes some state components at the initial time and prescribes
others at the terminal time; everything else about the dynamics lives in
the right-hand side.  State components are numbered 1..n throughout, the
same numbering used in trajectory CSV headers (x1..xn).

Index selections are kept as plain index tuples; applying one to a state
vector is a gather, never a dense 0/1 matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatchError, IndexOutOfRangeError, NonFiniteStateError
from .ode import IntegratorConfig, RhsFunction, Trajectory, integrate

JacobianFunction = Callable[[float, np.ndarray], np.ndarray]

# Central-difference step scale for the fallback rhs Jacobian.
_SQRT_EPS = float(np.sqrt(np.finfo(float).eps))


def select(indices: Sequence[int], x) -> np.ndarray:
    """Gather the 1-based ``indices`` from state vector ``x``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    for i in indices:
        if not 1 <= i <= n:
            raise IndexOutOfRangeError(f"state index {i} outside 1..{n}")
    return x[[i - 1 for i in indices]]


def _validated_indices(pairs, n, what):
    idx = [i for i, _ in pairs]
    if any(not 1 <= i <= n for i in idx):
        raise IndexOutOfRangeError(f"{what} indices {idx} outside 1..{n}")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError(f"{what} indices must be strictly increasing, got {idx}")
    return tuple(idx)


@dataclass(frozen=True)
class BvProblem:
    """Dynamics plus separated boundary data on an interval [a, b].

    ``fixed_initial`` lists (index, value) pairs pinned at t = a and
    ``target_terminal`` the pairs prescribed at t = b; both index lists are
    1-based and strictly increasing.  The remaining initial components are
    the shooting unknowns.  ``rhs_jacobian(t, x)`` is optional; central
    differences stand in when it is absent.
    """

    n: int
    interval: tuple[float, float]
    rhs: RhsFunction
    fixed_initial: tuple[tuple[int, float], ...]
    target_terminal: tuple[tuple[int, float], ...]
    rhs_jacobian: JacobianFunction | None = None
    free_indices: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        a, b = self.interval
        if not a < b:
            raise ValueError(f"interval must satisfy a < b, got [{a}, {b}]")
        object.__setattr__(self, "fixed_initial", tuple((int(i), float(v)) for i, v in self.fixed_initial))
        object.__setattr__(
            self, "target_terminal", tuple((int(i), float(v)) for i, v in self.target_terminal)
        )
        initial_idx = _validated_indices(self.fixed_initial, self.n, "fixed-initial")
        terminal_idx = _validated_indices(self.target_terminal, self.n, "target-terminal")
        m = len(initial_idx)
        if m >= self.n:
            raise ValueError("every initial value is fixed; this is an IVP, not a BVP")
        if len(terminal_idx) != self.n - m:
            raise ValueError(
                f"need exactly n-m={self.n - m} terminal conditions, got {len(terminal_idx)}"
            )
        free = tuple(i for i in range(1, self.n + 1) if i not in set(initial_idx))
        object.__setattr__(self, "free_indices", free)

    @property
    def m(self) -> int:
        return len(self.fixed_initial)

    @property
    def n_unknowns(self) -> int:
        return self.n - self.m

    @property
    def initial_indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.fixed_initial)

    @property
    def terminal_indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.target_terminal)

    @property
    def initial_values(self) -> np.ndarray:
        return np.array([v for _, v in self.fixed_initial])

    @property
    def terminal_values(self) -> np.ndarray:
        return np.array([v for _, v in self.target_terminal])

    def jacobian_at(self, t: float, x: np.ndarray) -> np.ndarray:
        """State Jacobian of the rhs: analytic when supplied, else central FD."""
        if self.rhs_jacobian is not None:
            return np.asarray(self.rhs_jacobian(t, x), dtype=float)
        return fd_rhs_jacobian(self, t, x)


def embed_initial(problem: BvProblem, c) -> np.ndarray:
    """Full initial state from unknowns ``c`` scattered over the free slots."""
    c = np.asarray(c, dtype=float)
    if c.shape != (problem.n_unknowns,):
        raise DimensionMismatchError(
            f"expected {problem.n_unknowns} unknown initial values, got shape {c.shape}"
        )
    x0 = np.empty(problem.n)
    for i, v in problem.fixed_initial:
        x0[i - 1] = v
    for k, i in enumerate(problem.free_indices):
        x0[i - 1] = c[k]
    return x0


def residual(
    problem: BvProblem, c, cfg: IntegratorConfig | None = None
) -> tuple[np.ndarray, Trajectory]:
    """Terminal mismatch of the shot from ``c``, plus the trajectory it rides on."""
    a, b = problem.interval
    traj = integrate(problem.rhs, a, b, embed_initial(problem, c), cfg)
    f = select(problem.terminal_indices, traj.final_state) - problem.terminal_values
    return f, traj


def fd_rhs_jacobian(problem: BvProblem, t: float, x) -> np.ndarray:
    """Central-difference state Jacobian of the rhs, column by column."""
    x = np.asarray(x, dtype=float)
    jac = np.empty((problem.n, problem.n))
    for j in range(problem.n):
        h = _SQRT_EPS * (1.0 + abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (np.asarray(problem.rhs(t, xp), dtype=float) - np.asarray(problem.rhs(t, xm), dtype=float)) / (2.0 * h)
    if not np.all(np.isfinite(jac)):
        raise NonFiniteStateError(f"rhs not finite near t={t!r} while differencing", t=t)
    return jac
