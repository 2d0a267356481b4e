import numpy as np
import pytest

import shootbvp as sb
from shootbvp import (
    SingularMatrixError,
    adjoint_jacobian,
    adjoint_rhs,
    bilinear_invariant,
    correction_system,
    embed_initial,
    forward_jacobian,
    linearized_rhs,
    lu_solve,
    flow_adjoint_deviation,
)
from shootbvp.adjoint import AdjointBundle

NILPOTENT = np.array([[0.0, 1.0], [0.0, 0.0]])


def make_linear_problem():
    return sb.BvProblem(
        n=2,
        interval=(0.0, 1.0),
        rhs=lambda t, x: NILPOTENT @ x,
        rhs_jacobian=lambda t, x: NILPOTENT,
        fixed_initial=((1, 0.0),),
        target_terminal=((1, 1.0),),
    )


class TestAdjointRhs:
    def test_zero_dynamics(self, toy_constant_problem):
        traj = sb.integrate(toy_constant_problem.rhs, 0.0, 1.0, [1.0, 2.0])
        rhs = adjoint_rhs(toy_constant_problem, traj)
        assert np.array_equal(rhs(0.5, np.array([1.0, -1.0])), np.zeros(2))

    def test_constant_linear_dynamics(self):
        p = make_linear_problem()
        traj = sb.integrate(p.rhs, 0.0, 1.0, [0.0, 1.0])
        rhs = adjoint_rhs(p, traj)
        q = np.array([2.0, -3.0])
        np.testing.assert_allclose(rhs(0.25, q), -(NILPOTENT.T @ q), rtol=1e-12)

    def test_transposed_state_jacobian_along_solution(self):
        p = sb.get("ex1").problem
        traj = sb.integrate(p.rhs, 0.0, 1.0, [0.0, 1.1596576])
        rhs = adjoint_rhs(p, traj)
        t = 0.6
        x = traj.interpolate(t)
        jac = np.array([[0.0, 1.0], [2.0 * x[1], 2.0 * x[0]]])
        q = np.array([0.7, -0.2])
        np.testing.assert_allclose(rhs(t, q), -(jac.T @ q), rtol=1e-10)


class TestAdjointJacobian:
    def test_constant_dynamics(self, toy_constant_problem):
        _, jac, _, bundle = adjoint_jacobian(toy_constant_problem, [0.0])
        np.testing.assert_allclose(jac, [[1.0]], atol=1e-12)
        assert bundle.columns[0][0] == 2
        np.testing.assert_allclose(bundle.columns[0][1], [0.0, 1.0], atol=1e-12)

    def test_nilpotent_backward_transport(self):
        # p' = -A^T p from e1 at t=1 lands on (1, 1) at t=0
        p = make_linear_problem()
        _, jac, _, bundle = adjoint_jacobian(p, [0.0])
        np.testing.assert_allclose(bundle.columns[0][1], [1.0, 1.0], atol=1e-9)
        np.testing.assert_allclose(jac, [[1.0]], atol=1e-9)

    def test_agrees_with_forward_route(self):
        p = sb.get("ex3").problem
        c = np.array([1.9447725])
        _, j_fwd, _ = forward_jacobian(p, c)
        _, j_adj, _, _ = adjoint_jacobian(p, c)
        assert np.max(np.abs(j_fwd - j_adj)) <= 1e-6 * (1.0 + np.max(np.abs(j_fwd)))


class TestFlowAdjointIdentity:
    def test_zero_dynamics(self, toy_constant_problem):
        assert flow_adjoint_deviation(toy_constant_problem, [1.0, 2.0]) <= 1e-12

    def test_nilpotent(self):
        assert flow_adjoint_deviation(make_linear_problem(), [0.2, 0.4]) <= 1e-9

    def test_similarity_system_at_solution(self, solved):
        p = sb.get("ex2").problem
        rep = solved("ex2", (0.0, 0.0))
        assert flow_adjoint_deviation(p, embed_initial(p, rep.c_final)) <= 1e-6


class TestBilinearInvariant:
    def test_zero_dynamics(self, toy_constant_problem):
        p = toy_constant_problem
        traj = sb.integrate(p.rhs, 0.0, 1.0, [0.0, 1.0])
        d = sb.integrate(linearized_rhs(p, traj), 0.0, 1.0, [0.0, 1.0])
        q = sb.integrate(adjoint_rhs(p, traj), 1.0, 0.0, [1.0, 0.0])
        assert bilinear_invariant(q, d) == 0.0

    def test_nilpotent_explicit_solutions(self):
        # d(t) = (t, 1), p(t) = (1, 1-t): pairing is 1 for all t
        p = make_linear_problem()
        traj = sb.integrate(p.rhs, 0.0, 1.0, [0.0, 0.0])
        d = sb.integrate(linearized_rhs(p, traj), 0.0, 1.0, [0.0, 1.0])
        q = sb.integrate(adjoint_rhs(p, traj), 1.0, 0.0, [1.0, 0.0])
        assert bilinear_invariant(q, d) <= 1e-9

    def test_along_converged_solution(self, solved):
        p = sb.get("ex1").problem
        traj = solved("ex1", (1.0,)).final_trajectory
        d = sb.integrate(linearized_rhs(p, traj), 0.0, 1.0, [0.0, 1.0])
        q = sb.integrate(adjoint_rhs(p, traj), 1.0, 0.0, [1.0, 0.0])
        assert bilinear_invariant(q, d) <= 1e-6


class TestCorrectionSystem:
    def test_constant_dynamics_single_step(self, toy_constant_problem):
        p = toy_constant_problem
        _, _, traj, bundle = adjoint_jacobian(p, [1.0])
        mat, rhs = correction_system(bundle, p, traj.final_state)
        np.testing.assert_allclose(mat, [[1.0]], atol=1e-12)
        np.testing.assert_allclose(rhs, [2.0], atol=1e-12)
        np.testing.assert_allclose(lu_solve(mat, rhs), [2.0], atol=1e-12)

    def test_at_exact_solution_correction_vanishes(self):
        p = sb.get("ex4").problem
        _, _, traj, bundle = adjoint_jacobian(p, [0.0])
        _, rhs = correction_system(bundle, p, traj.final_state)
        assert np.max(np.abs(rhs)) <= 1e-7

    def test_rank_deficient_bundle(self, toy_constant_problem):
        bundle = AdjointBundle(
            columns=((2, np.zeros(2)),), assembled=np.zeros((1, 2))
        )
        mat, rhs = correction_system(bundle, toy_constant_problem, np.array([0.0, 1.0]))
        with pytest.raises(SingularMatrixError):
            lu_solve(mat, rhs)

    @pytest.mark.parametrize("name,c", [("ex1", [0.9]), ("ex2", [-1.0, -0.3]), ("ex4", [0.2])])
    def test_reproduces_newton_step(self, name, c):
        p = sb.get(name).problem
        f, j_fwd, _ = forward_jacobian(p, c)
        step_fwd = lu_solve(j_fwd, -f)
        _, _, traj, bundle = adjoint_jacobian(p, c)
        mat, rhs = correction_system(bundle, p, traj.final_state)
        step_adj = lu_solve(mat, rhs)
        assert np.max(np.abs(step_adj - step_fwd)) <= 1e-6 * (1.0 + np.max(np.abs(step_fwd)))


@pytest.mark.parametrize(
    "name,c",
    [
        ("ex1", [1.0]),
        ("ex1", [1.1596576]),
        ("ex2", [0.0, 0.0]),
        ("ex2", [-2.0, 0.0]),
        ("ex3", [0.0]),
        ("ex3", [5.0]),
        ("ex4", [0.0]),
        ("ex4", [0.3]),
    ],
)
def test_jacobian_duality(name, c):
    p = sb.get(name).problem
    _, j_fwd, _ = forward_jacobian(p, c)
    _, j_adj, _, _ = adjoint_jacobian(p, c)
    assert np.max(np.abs(j_adj - j_fwd)) <= 1e-6 * (1.0 + np.max(np.abs(j_fwd)))
