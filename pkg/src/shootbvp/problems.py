"""Built-in boundary value problems with known results.

Four classic problems, each reduced to a first-order system with the
state ordered (function, derivatives ascending) per equation:

``ex1``  y'' = 2 y y' on [0, 1], y(0)=0, y(1)=2.  Closed form a*tan(a*t)
         with a*tan(a) = 2.
``ex2``  Free-convection similarity equations f''' + f f'' - (f')^2 = 0,
         theta'' + k theta' f = 0 on [0, 5] with f(0)=0, f'(0)=1,
         theta(0)=1, f'(5)=0, theta(5)=0; k is the Prandtl number.
         Two distinct solutions are reachable from different guesses.
``ex3``  Bratu-type u'' + e^(u+1) = 0 on [0, 1], u(0)=u(1)=0.  Two
         branches, one per root of theta = sqrt(2e) cosh(theta/4).
``ex4``  x1' = x2, x2' = 2 x1^3 - 6 x1 - 2 t^3 on [1, 2], x1(1)=2,
         x1(2)=2.5.  Closed form x1 = t + 1/t.

Initial-slope guesses for ex4 above ~0.44 leave the interval of existence
(the solution blows up before t=2), so its default guess sits at 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bvp import BvProblem
from .errors import NoReferenceError, NotConvergedError

Reference = Callable[[float], np.ndarray]


def _scalar_newton(g, dg, x0: float, tol: float = 1e-13, max_iter: int = 100) -> float:
    x = x0
    for _ in range(max_iter):
        gx = g(x)
        if abs(gx) <= tol:
            return x
        x -= gx / dg(x)
    raise NotConvergedError(f"scalar Newton stalled at x={x!r}, residual={g(x):.3e}")


def bratu_theta(branch: int) -> float:
    """Root of theta = sqrt(2e) cosh(theta/4); branch 1 near 3, branch 2 near 7."""
    if branch not in (1, 2):
        raise ValueError(f"branch must be 1 or 2, got {branch}")
    s = math.sqrt(2.0 * math.e)
    g = lambda th: th - s * math.cosh(th / 4.0)
    dg = lambda th: 1.0 - s * math.sinh(th / 4.0) / 4.0
    return _scalar_newton(g, dg, 3.0 if branch == 1 else 7.0, tol=1e-12)


def _tan_root() -> float:
    """Root of a*tan(a) = 2 in (0, pi/2)."""
    g = lambda a: a * math.tan(a) - 2.0
    dg = lambda a: math.tan(a) + a * (1.0 + math.tan(a) ** 2)
    return _scalar_newton(g, dg, 1.0)


def _ex1_problem() -> BvProblem:
    def rhs(t, x):
        return np.array([x[1], 2.0 * x[0] * x[1]])

    def jac(t, x):
        return np.array([[0.0, 1.0], [2.0 * x[1], 2.0 * x[0]]])

    return BvProblem(
        n=2,
        interval=(0.0, 1.0),
        rhs=rhs,
        rhs_jacobian=jac,
        fixed_initial=((1, 0.0),),
        target_terminal=((1, 2.0),),
    )


def _ex1_reference() -> Reference:
    a = _tan_root()

    def ref(t):
        tan_at = math.tan(a * t)
        return np.array([a * tan_at, a * a * (1.0 + tan_at * tan_at)])

    return ref


def _ex2_problem(k: float = 0.71) -> BvProblem:
    # state (f, f', f'', theta, theta')
    def rhs(t, x):
        return np.array(
            [x[1], x[2], x[1] * x[1] - x[0] * x[2], x[4], -k * x[4] * x[0]]
        )

    def jac(t, x):
        return np.array(
            [
                [0.0, 1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0, 0.0],
                [-x[2], 2.0 * x[1], -x[0], 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 1.0],
                [-k * x[4], 0.0, 0.0, 0.0, -k * x[0]],
            ]
        )

    return BvProblem(
        n=5,
        interval=(0.0, 5.0),
        rhs=rhs,
        rhs_jacobian=jac,
        fixed_initial=((1, 0.0), (2, 1.0), (4, 1.0)),
        target_terminal=((2, 0.0), (4, 0.0)),
    )


def _ex3_problem() -> BvProblem:
    def rhs(t, x):
        return np.array([x[1], -math.exp(x[0] + 1.0)])

    def jac(t, x):
        return np.array([[0.0, 1.0], [-math.exp(x[0] + 1.0), 0.0]])

    return BvProblem(
        n=2,
        interval=(0.0, 1.0),
        rhs=rhs,
        rhs_jacobian=jac,
        fixed_initial=((1, 0.0),),
        target_terminal=((1, 0.0),),
    )


def _ex3_reference(branch: int) -> Reference:
    theta = bratu_theta(branch)
    denom = math.cosh(theta / 4.0)

    def ref(t):
        arg = (t - 0.5) * theta / 2.0
        return np.array(
            [-2.0 * math.log(math.cosh(arg) / denom), -theta * math.tanh(arg)]
        )

    return ref


def _ex4_problem() -> BvProblem:
    def rhs(t, x):
        return np.array([x[1], 2.0 * x[0] ** 3 - 6.0 * x[0] - 2.0 * t**3])

    def jac(t, x):
        return np.array([[0.0, 1.0], [6.0 * x[0] * x[0] - 6.0, 0.0]])

    return BvProblem(
        n=2,
        interval=(1.0, 2.0),
        rhs=rhs,
        rhs_jacobian=jac,
        fixed_initial=((1, 2.0),),
        target_terminal=((1, 2.5),),
    )


def _ex4_reference() -> Reference:
    def ref(t):
        return np.array([t + 1.0 / t, 1.0 - 1.0 / (t * t)])

    return ref


@dataclass(frozen=True)
class ExampleSpec:
    """A registry entry: problem factory, guesses, labels, references."""

    name: str
    factory: Callable[..., BvProblem]
    parameters: dict
    default_guesses: tuple[np.ndarray, ...]
    component_labels: tuple[str, ...]
    branches: tuple[int, ...] = ()

    @property
    def problem(self) -> BvProblem:
        return self.factory(**self.parameters)

    def make_problem(self, **overrides) -> BvProblem:
        unknown = set(overrides) - set(self.parameters)
        if unknown:
            raise KeyError(f"{self.name} has no parameter(s) {sorted(unknown)}")
        return self.factory(**{**self.parameters, **overrides})

    def reference(self, branch: int | None = None) -> Reference:
        return reference_solution(self.name, branch)


def registry() -> tuple[ExampleSpec, ...]:
    """All built-in problems, in their customary order."""
    return (
        ExampleSpec(
            name="ex1",
            factory=lambda: _ex1_problem(),
            parameters={},
            default_guesses=(np.array([1.0]),),
            component_labels=("y", "dy/dt"),
        ),
        ExampleSpec(
            name="ex2",
            factory=_ex2_problem,
            parameters={"k": 0.71},
            default_guesses=(
                np.array([0.0, 0.0]),
                np.array([-1.0, -1.0]),
                np.array([-2.0, 0.0]),
            ),
            component_labels=("f", "f'", "f''", "theta", "theta'"),
        ),
        ExampleSpec(
            name="ex3",
            factory=lambda: _ex3_problem(),
            parameters={},
            default_guesses=(np.array([0.0]), np.array([5.0])),
            component_labels=("u", "u'"),
            branches=(1, 2),
        ),
        ExampleSpec(
            name="ex4",
            factory=lambda: _ex4_problem(),
            parameters={},
            default_guesses=(np.array([0.0]),),
            component_labels=("x1", "x2"),
        ),
    )


def get(name: str) -> ExampleSpec:
    for spec in registry():
        if spec.name == name:
            return spec
    raise KeyError(f"unknown problem {name!r}; known: {[s.name for s in registry()]}")


def reference_solution(name: str, branch: int | None = None) -> Reference:
    """Closed-form solution for ex1, ex3 (branch required) or ex4."""
    if name == "ex1":
        return _ex1_reference()
    if name == "ex3":
        if branch is None:
            raise ValueError("ex3 has two branches; pass branch=1 or branch=2")
        return _ex3_reference(branch)
    if name == "ex4":
        return _ex4_reference()
    raise NoReferenceError(f"no closed-form reference for {name!r}")
