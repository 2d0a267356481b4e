import numpy as np
import pytest

import shootbvp as sb


@pytest.fixture(scope="session")
def solved():
    """Cached shooting solves keyed by (problem, guess, jacobian mode)."""
    cache = {}

    def solve(name, guess, mode="forward"):
        key = (name, tuple(np.atleast_1d(guess)), mode)
        if key not in cache:
            spec = sb.get(name)
            cache[key] = sb.solve_bvp(
                spec.problem, np.asarray(guess, dtype=float), sb.SolveOptions(jacobian_mode=mode)
            )
        return cache[key]

    return solve


@pytest.fixture
def toy_constant_problem():
    """x' = 0 with x1(0) = 0 fixed and x2(1) = 3 required: F(c) = c - 3."""

    def rhs(t, x):
        return np.zeros_like(x)

    return sb.BvProblem(
        n=2,
        interval=(0.0, 1.0),
        rhs=rhs,
        fixed_initial=((1, 0.0),),
        target_terminal=((2, 3.0),),
    )


@pytest.fixture
def nilpotent_problem():
    """x' = A x with A = [[0,1],[0,0]]: flow over one unit is I + A."""
    a = np.array([[0.0, 1.0], [0.0, 0.0]])

    return sb.BvProblem(
        n=2,
        interval=(0.0, 1.0),
        rhs=lambda t, x: a @ x,
        rhs_jacobian=lambda t, x: a,
        fixed_initial=((1, 0.0),),
        target_terminal=((1, 1.0),),
    )
