"""Shooting-method solver for two-point boundary value problems.

Boundary conditions are separated and explicit: some state components are
fixed at the initial time, others prescribed at the terminal time.  The
unknown initial values are found by Newton iteration on the terminal
mismatch, with the Jacobian available three ways: forward variational
equations, backward adjoint integration, or finite differences.
"""

from .adjoint import (
    AdjointBundle,
    adjoint_jacobian,
    adjoint_rhs,
    bilinear_invariant,
    correction_system,
    linearized_rhs,
    flow_adjoint_deviation,
)
from .bvp import BvProblem, embed_initial, fd_rhs_jacobian, residual, select
from .errors import (
    DimensionMismatchError,
    IndexOutOfRangeError,
    IntegrationError,
    MaxStepsExceededError,
    NoReferenceError,
    NonFiniteStateError,
    NotConvergedError,
    ShootingError,
    SingularMatrixError,
    StepSizeUnderflowError,
    TimeOutOfRangeError,
)
from .linalg import basis_vector, inf_norm, lu_solve
from .newton import SolveOptions, SolveReport, fd_shooting_jacobian, solve_bvp
from .ode import BACKEND, IntegratorConfig, Trajectory, integrate, interpolate
from .problems import ExampleSpec, bratu_theta, get, reference_solution, registry
from .sensitivity import augmented_rhs, forward_jacobian, full_sensitivity

__version__ = "0.1.0"

__all__ = [
    "AdjointBundle",
    "BACKEND",
    "BvProblem",
    "DimensionMismatchError",
    "ExampleSpec",
    "IndexOutOfRangeError",
    "IntegrationError",
    "IntegratorConfig",
    "MaxStepsExceededError",
    "NoReferenceError",
    "NonFiniteStateError",
    "NotConvergedError",
    "ShootingError",
    "SingularMatrixError",
    "SolveOptions",
    "SolveReport",
    "StepSizeUnderflowError",
    "TimeOutOfRangeError",
    "Trajectory",
    "adjoint_jacobian",
    "adjoint_rhs",
    "augmented_rhs",
    "basis_vector",
    "bilinear_invariant",
    "bratu_theta",
    "correction_system",
    "embed_initial",
    "fd_rhs_jacobian",
    "fd_shooting_jacobian",
    "forward_jacobian",
    "full_sensitivity",
    "get",
    "inf_norm",
    "integrate",
    "interpolate",
    "linearized_rhs",
    "lu_solve",
    "reference_solution",
    "registry",
    "residual",
    "select",
    "solve_bvp",
    "flow_adjoint_deviation",
]
