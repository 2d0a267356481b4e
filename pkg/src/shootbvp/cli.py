"""Command-line front end: solve, verify, and list subcommands.

``solve`` runs the shooting iteration on a built-in problem and prints the
initial/final value table; ``verify`` cross-checks the three Jacobian
routes and the adjoint identities at a given guess; ``list`` shows what is
available.  Trajectories and iteration traces can be written as CSV and
trajectories additionally as a self-contained SVG plot.

Exit codes: 0 success, 1 not converged (or verify deviations too large),
2 invalid input, 3 integration failure, 4 singular Jacobian, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import adjoint as _adjoint
from . import problems
from .bvp import BvProblem, embed_initial
from .errors import IntegrationError, SingularMatrixError
from .linalg import basis_vector, lu_solve
from .newton import SolveOptions, SolveReport, fd_shooting_jacobian, solve_bvp
from .ode import IntegratorConfig, Trajectory, integrate
from .sensitivity import forward_jacobian

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_INVALID_INPUT = 2
EXIT_INTEGRATION_FAILURE = 3
EXIT_SINGULAR_JACOBIAN = 4
EXIT_IO_ERROR = 5

# Cross-check threshold for the verify subcommand.
VERIFY_TOL = 1e-4

_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_JACOBIAN_MODES = {"forward": "forward", "adjoint": "adjoint", "fd": "finite_difference"}


def format_value(v: float) -> str:
    """7 decimal places, switching to scientific below 1e-6 in magnitude."""
    if v != 0.0 and abs(v) < 1e-6:
        return f"{v:.3e}"
    return f"{v + 0.0:.7f}"


def _fail(message, code: int) -> int:
    if isinstance(message, BaseException):
        message = message.args[0] if message.args else str(message)
    print(f"error: {message}", file=sys.stderr)
    return code


def _parse_guess(text: str, expected: int):
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise ValueError(f"guess {text!r} is not a comma-separated number list")
    if len(values) != expected:
        raise ValueError(f"guess has {len(values)} entries, problem needs {expected}")
    return np.array(values)


def _resolve(args):
    """Problem spec, problem (with overrides) and starting guess from flags."""
    spec = problems.get(args.problem)
    overrides = {}
    for item in args.set or []:
        if "=" not in item:
            raise ValueError(f"--set expects name=value, got {item!r}")
        key, _, raw = item.partition("=")
        overrides[key] = float(raw)
    problem = spec.make_problem(**overrides)
    if args.guess is not None:
        guess = _parse_guess(args.guess, problem.n_unknowns)
    else:
        guess = spec.default_guesses[0]
    return spec, problem, guess


def _solve_options(args) -> SolveOptions:
    return SolveOptions(
        jacobian_mode=_JACOBIAN_MODES[args.jacobian],
        max_iter=args.max_iter,
        integrator=IntegratorConfig(rtol=args.rtol, atol=args.atol),
    )


def boundary_table(problem: BvProblem, labels, report: SolveReport) -> str:
    """Two-column initial/final value table in the style of the result tables."""
    a, b = problem.interval
    left = [f"{lab}({a:g})={format_value(v)}" for lab, v in zip(labels, report.initial_state)]
    right = [f"{lab}({b:g})={format_value(v)}" for lab, v in zip(labels, report.final_state)]
    width = max(len(s) for s in ["Initial values"] + left) + 3
    lines = [f"{'Initial values':<{width}}Final values"]
    lines += [f"{lhs:<{width}}{rhs}" for lhs, rhs in zip(left, right)]
    return "\n".join(lines)


def emit_trajectory_csv(traj: Trajectory, path) -> None:
    """One row per node, 15 significant digits, header ``t,x1,...,xn``."""
    n = traj.x.shape[1]
    with open(path, "w") as handle:
        handle.write("t," + ",".join(f"x{i}" for i in range(1, n + 1)) + "\n")
        for t, x in zip(traj.t, traj.x):
            handle.write(f"{t:.15g}," + ",".join(f"{v:.15g}" for v in x) + "\n")


def emit_trace_csv(report: SolveReport, path) -> None:
    """Iteration history: unknowns, residual norm and step norm per pass."""
    k = len(report.c_final)
    with open(path, "w") as handle:
        handle.write("k," + ",".join(f"c{i}" for i in range(1, k + 1)) + ",residual_inf,step_inf\n")
        for rec in report.iterations:
            cs = ",".join(f"{v:.15g}" for v in rec.c)
            handle.write(f"{rec.k},{cs},{rec.residual_norm:.15g},{rec.step_norm:.15g}\n")


def emit_svg(traj: Trajectory, path, labels=None) -> None:
    """Self-contained 800x600 SVG: one polyline per state component over t."""
    width, height = 800, 600
    ml, mr, mt, mb = 65, 20, 20, 45
    n = traj.x.shape[1]
    if labels is None:
        labels = [f"x{i}" for i in range(1, n + 1)]

    t_lo, t_hi = float(np.min(traj.t)), float(np.max(traj.t))
    x_lo, x_hi = float(np.min(traj.x)), float(np.max(traj.x))
    t_pad = 0.05 * (t_hi - t_lo) or 1.0
    x_pad = 0.05 * (x_hi - x_lo) or 1.0
    t_lo, t_hi = t_lo - t_pad, t_hi + t_pad
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad

    def sx(t):
        return ml + (t - t_lo) / (t_hi - t_lo) * (width - ml - mr)

    def sy(x):
        return height - mb - (x - x_lo) / (x_hi - x_lo) * (height - mt - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" stroke="black"/>',
    ]
    for tick in np.linspace(t_lo, t_hi, 5):
        px = sx(tick)
        parts.append(f'<line x1="{px:.2f}" y1="{height - mb}" x2="{px:.2f}" y2="{height - mb + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{px:.2f}" y="{height - mb + 20}" font-size="12" text-anchor="middle">{tick:.4g}</text>'
        )
    for tick in np.linspace(x_lo, x_hi, 5):
        py = sy(tick)
        parts.append(f'<line x1="{ml - 5}" y1="{py:.2f}" x2="{ml}" y2="{py:.2f}" stroke="black"/>')
        parts.append(
            f'<text x="{ml - 8}" y="{py + 4:.2f}" font-size="12" text-anchor="end">{tick:.4g}</text>'
        )
    parts.append(f'<text x="{(ml + width - mr) / 2:.0f}" y="{height - 8}" font-size="13" text-anchor="middle">t</text>')

    for j in range(n):
        color = _SVG_COLORS[j % len(_SVG_COLORS)]
        points = " ".join(f"{sx(t):.2f},{sy(x):.2f}" for t, x in zip(traj.t, traj.x[:, j]))
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = mt + 18 * (j + 1)
        parts.append(
            f'<line x1="{width - mr - 120}" y1="{ly - 4}" x2="{width - mr - 95}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(f'<text x="{width - mr - 88}" y="{ly}" font-size="13">{labels[j]}</text>')
    parts.append("</svg>")

    with open(path, "w") as handle:
        handle.write("\n".join(parts) + "\n")


def cmd_solve(args) -> int:
    try:
        spec, problem, guess = _resolve(args)
        opts = _solve_options(args)
    except (KeyError, ValueError) as exc:
        return _fail(exc, EXIT_INVALID_INPUT)

    try:
        report = solve_bvp(problem, guess, opts)
    except IntegrationError as exc:
        return _fail(f"integration failed: {exc}", EXIT_INTEGRATION_FAILURE)
    except SingularMatrixError as exc:
        return _fail(f"singular shooting Jacobian: {exc}", EXIT_SINGULAR_JACOBIAN)

    try:
        if args.out:
            emit_trajectory_csv(report.final_trajectory, args.out)
        if args.trace:
            emit_trace_csv(report, args.trace)
        if args.svg:
            emit_svg(report.final_trajectory, args.svg, spec.component_labels)
    except OSError as exc:
        return _fail(f"cannot write output: {exc}", EXIT_IO_ERROR)

    if not report.converged:
        return _fail(
            f"{spec.name} did not converge in {report.newton_steps} iterations "
            f"(last residual {report.iterations[-1].residual_norm:.3e})",
            EXIT_NOT_CONVERGED,
        )
    print(f"{spec.name}: converged in {report.newton_steps} iterations")
    print(boundary_table(problem, spec.component_labels, report))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        spec, problem, guess = _resolve(args)
        opts = _solve_options(args)
    except (KeyError, ValueError) as exc:
        return _fail(exc, EXIT_INVALID_INPUT)
    cfg = opts.integrator

    try:
        c = guess
        if args.at_solution:
            report = solve_bvp(problem, guess, opts)
            if not report.converged:
                return _fail("cannot verify at solution: solve did not converge", EXIT_NOT_CONVERGED)
            c = report.c_final

        _, j_fwd, traj = forward_jacobian(problem, c, cfg)
        _, j_adj, _, _ = _adjoint.adjoint_jacobian(problem, c, cfg)
        j_fd = fd_shooting_jacobian(problem, c, cfg)
        flow_dev = _adjoint.flow_adjoint_deviation(problem, embed_initial(problem, c), cfg)

        a, b = problem.interval
        d0 = basis_vector(problem.free_indices[0], problem.n)
        d_traj = integrate(_adjoint.linearized_rhs(problem, traj), a, b, d0, cfg)
        p_traj = integrate(
            _adjoint.adjoint_rhs(problem, traj),
            b,
            a,
            basis_vector(problem.terminal_indices[0], problem.n),
            cfg,
        )
        drift = _adjoint.bilinear_invariant(p_traj, d_traj)
    except IntegrationError as exc:
        return _fail(f"integration failed: {exc}", EXIT_INTEGRATION_FAILURE)
    except SingularMatrixError as exc:
        return _fail(f"singular shooting Jacobian: {exc}", EXIT_SINGULAR_JACOBIAN)

    checks = [
        ("max|J_forward - J_adjoint|", float(np.max(np.abs(j_fwd - j_adj)))),
        ("max|J_forward - J_fd|", float(np.max(np.abs(j_fwd - j_fd)))),
        ("flow-vs-adjoint deviation", flow_dev),
        ("bilinear pairing drift", drift),
    ]
    print(f"{spec.name} at c = [{', '.join(format_value(v) for v in c)}]")
    for label, value in checks:
        print(f"  {label:<28s}= {value:.3e}")
    return EXIT_OK if all(value <= VERIFY_TOL for _, value in checks) else EXIT_NOT_CONVERGED


def cmd_list(args) -> int:
    records = []
    for spec in problems.registry():
        problem = spec.problem
        records.append(
            {
                "name": spec.name,
                "n": problem.n,
                "interval": list(problem.interval),
                "unknowns": problem.n_unknowns,
                "guesses": [list(map(float, g)) for g in spec.default_guesses],
                "parameters": spec.parameters,
            }
        )
    if args.json:
        print(json.dumps(records, indent=2))
        return EXIT_OK
    for rec in records:
        a, b = rec["interval"]
        guesses = " ".join("(" + ",".join(f"{v:g}" for v in g) + ")" for g in rec["guesses"])
        print(
            f"{rec['name']}  n={rec['n']}  interval=[{a:g}, {b:g}]  "
            f"unknowns={rec['unknowns']}  guesses: {guesses}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shootbvp",
        description="Solve two-point boundary value problems by the shooting method.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p):
        p.add_argument("--problem", required=True, help="problem name (see `shootbvp list`)")
        p.add_argument("--guess", help="comma-separated unknown initial values")
        p.add_argument(
            "--jacobian", choices=sorted(_JACOBIAN_MODES), default="forward",
            help="how to compute the shooting Jacobian",
        )
        p.add_argument("--rtol", type=float, default=1e-10)
        p.add_argument("--atol", type=float, default=1e-12)
        p.add_argument("--max-iter", type=int, default=25)
        p.add_argument(
            "--set", action="append", metavar="NAME=VALUE",
            help="override a problem parameter (repeatable)",
        )

    p_solve = sub.add_parser("solve", help="run the shooting iteration")
    add_run_flags(p_solve)
    p_solve.add_argument("--out", help="write the converged trajectory as CSV")
    p_solve.add_argument("--trace", help="write the iteration history as CSV")
    p_solve.add_argument("--svg", help="write a plot of the converged trajectory")
    p_solve.set_defaults(handler=cmd_solve)

    p_verify = sub.add_parser("verify", help="cross-check Jacobian routes and adjoint identities")
    add_run_flags(p_verify)
    p_verify.add_argument(
        "--at-solution", action="store_true", help="verify at the converged unknowns instead of the guess"
    )
    p_verify.set_defaults(handler=cmd_verify)

    p_list = sub.add_parser("list", help="show the built-in problems")
    p_list.add_argument("--json", action="store_true", help="machine-readable output")
    p_list.set_defaults(handler=cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
