"""Command-line surface: solve, certify, eigen-bound and green subcommands.

Exit codes: 0 success (certify: Satisfied), 2 invalid input, 3 NotSatisfied,
4 no convergence within the iteration budget, 5 evaluation error in F.

Output formats: ``human`` (10 significant digits), ``json`` and ``csv``
(17 significant digits, round-trip safe).  The flags --a and --b (and the
point flags --x/--tau) accept the literals ``e`` and ``pi``.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import expr
from .certificates import (Verdict, certify_uniqueness, eigen_lower_bound,
                           nonexistence_verdict)
from .core import Interval, Order, to_log_coordinates
from .errors import DomainError, EvaluationError, GridMismatchError, ParseError
from .green import GreenKernel, green_argmax, green_eval, green_max_integral, green_row_integral
from .solver import Problem, QuadratureConfig, SolveConfig, picard_solve

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_SATISFIED = 3
EXIT_NO_CONVERGENCE = 4
EXIT_EVALUATION = 5


def real_literal(text: str) -> float:
    """Float parser that also accepts the literals e and pi."""
    low = text.strip().lower()
    if low == "e":
        return math.e
    if low == "pi":
        return math.pi
    return float(text)


def _fmt(value: float, digits: int) -> str:
    return format(float(value), f".{digits}g")


def _json_ready(value):
    if isinstance(value, float):
        return float(_fmt(value, 17))
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    return value


class _Output:
    def __init__(self, args):
        self.fmt = args.format
        self.path = args.out

    def emit(self, doc: dict, human_lines: list[str], csv_rows: list[tuple] | None = None,
             csv_header: tuple | None = None):
        if self.fmt == "json":
            text = json.dumps(_json_ready(doc), indent=2, sort_keys=True) + "\n"
        elif self.fmt == "csv":
            buf = io.StringIO()
            if csv_rows is None:
                # Key/value fallback for subcommands without a natural table.
                csv_header = ("key", "value")
                csv_rows = _flatten_doc(doc)
            buf.write(",".join(csv_header) + "\r\n")
            for row in csv_rows:
                buf.write(",".join(_fmt(v, 17) if isinstance(v, float) else str(v)
                                   for v in row) + "\r\n")
            text = buf.getvalue()
        else:
            text = "\n".join(human_lines) + "\n"
        if self.path:
            with open(self.path, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _flatten_doc(doc, prefix=""):
    rows = []
    for key in sorted(doc):
        value = doc[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(_flatten_doc(value, prefix=f"{name}."))
        elif isinstance(value, (list, tuple)):
            continue
        else:
            rows.append((name, value))
    return rows


def _common_flags(sub):
    sub.add_argument("--format", choices=("human", "json", "csv"), default="human")
    sub.add_argument("--out", default=None, help="write output to this path instead of stdout")
    sub.add_argument("--nodes", type=int, default=64, help="quadrature nodes per panel")
    sub.add_argument("--grid", type=int, default=129, help="solution grid size")
    sub.add_argument("--tol", type=float, default=1e-10, help="sup-norm stopping tolerance")
    sub.add_argument("--max-iter", type=int, default=1000, help="iteration budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hadamard-bvp",
        description="Solve and certify two-point boundary value problems driven by "
                    "the Hadamard fractional derivative.")
    subs = parser.add_subparsers(dest="command", required=True)

    p_cert = subs.add_parser("certify", help="uniqueness certificate for a K-Lipschitz load")
    p_cert.add_argument("--sigma", type=float, required=True)
    p_cert.add_argument("--a", type=real_literal, required=True)
    p_cert.add_argument("--b", type=real_literal, required=True)
    p_cert.add_argument("--K", type=float, required=True, dest="lipschitz_k")
    _common_flags(p_cert)
    p_cert.set_defaults(handler=cmd_certify)

    p_eig = subs.add_parser("eigen-bound", help="eigenvalue lower bound, optional verdict for lambda")
    p_eig.add_argument("--sigma", type=float, required=True)
    p_eig.add_argument("--a", type=real_literal, required=True)
    p_eig.add_argument("--b", type=real_literal, required=True)
    p_eig.add_argument("--lambda", type=float, default=None, dest="lam")
    _common_flags(p_eig)
    p_eig.set_defaults(handler=cmd_eigen_bound)

    p_solve = subs.add_parser("solve", help="solve the two-point problem by fixed-point iteration")
    p_solve.add_argument("--sigma", type=float, required=True)
    p_solve.add_argument("--a", type=real_literal, required=True)
    p_solve.add_argument("--b", type=real_literal, required=True)
    p_solve.add_argument("--B", type=float, required=True, dest="boundary_value")
    p_solve.add_argument("--F", required=True, dest="load_source",
                         help='load F(x, u), e.g. "(x-1)^2 + sqrt(x-1+u^2)"')
    p_solve.add_argument("--K", type=float, default=None, dest="lipschitz_k",
                         help="Lipschitz constant of F in u (enables certificate)")
    p_solve.add_argument("--singular-exponent", type=float, default=None,
                         help="declare F ~ (ln(x/a))^beta near a (beta > -1)")
    p_solve.add_argument("--with-log-coordinate", action="store_true",
                         help="add the column t = ln(x/a) to the table")
    _common_flags(p_solve)
    p_solve.set_defaults(handler=cmd_solve)

    p_green = subs.add_parser("green", help="Green's function values, row integral, extrema")
    p_green.add_argument("--sigma", type=float, required=True)
    p_green.add_argument("--a", type=real_literal, required=True)
    p_green.add_argument("--b", type=real_literal, required=True)
    p_green.add_argument("--x", type=real_literal, default=None)
    p_green.add_argument("--tau", type=real_literal, default=None)
    _common_flags(p_green)
    p_green.set_defaults(handler=cmd_green)

    return parser


def _problem_params(args) -> dict:
    return {"sigma": args.sigma, "a": args.a, "b": args.b}


def cmd_certify(args, out: _Output) -> int:
    cert = certify_uniqueness(Order(args.sigma), Interval(args.a, args.b), args.lipschitz_k)
    doc = {"params": {**_problem_params(args), "K": args.lipschitz_k},
           "certificate": cert.to_dict()}
    lines = [
        f"threshold   = {_fmt(cert.threshold, 10)}",
        f"ratio b/a   = {_fmt(cert.ratio, 10)}",
        f"contraction = {_fmt(cert.contraction, 10)}",
        f"verdict     = {cert.verdict.value}",
    ]
    out.emit(doc, lines)
    return EXIT_OK if cert.verdict is Verdict.SATISFIED else EXIT_NOT_SATISFIED


def cmd_eigen_bound(args, out: _Output) -> int:
    order = Order(args.sigma)
    interval = Interval(args.a, args.b)
    if args.lam is None:
        bound = eigen_lower_bound(order, interval)
        doc = {"params": _problem_params(args),
               "certificate": {"sigma": order.sigma, "a": interval.a, "b": interval.b,
                               "bound": bound}}
        lines = [f"bound       = {_fmt(bound, 10)}"]
    else:
        cert = nonexistence_verdict(order, interval, args.lam)
        doc = {"params": {**_problem_params(args), "lambda": args.lam},
               "certificate": cert.to_dict()}
        lines = [
            f"bound       = {_fmt(cert.bound, 10)}",
            f"lambda      = {_fmt(cert.lam, 10)}",
            f"verdict     = {cert.verdict.value}",
        ]
    out.emit(doc, lines)
    return EXIT_OK


def cmd_solve(args, out: _Output) -> int:
    tree = expr.parse(args.load_source)
    unknown = expr.free_variables(tree) - {"x", "u"}
    if unknown:
        raise DomainError(f"unknown variables in F: {sorted(unknown)}")

    def load(x, u):
        return expr.evaluate_array(tree, x, u)

    problem = Problem(order=Order(args.sigma), interval=Interval(args.a, args.b),
                      boundary_value=args.boundary_value, load=load,
                      lipschitz_k=args.lipschitz_k,
                      load_exponent=args.singular_exponent)
    cfg = QuadratureConfig(node_count=args.nodes, grid_size=args.grid)
    scfg = SolveConfig(tolerance=args.tol, max_iterations=args.max_iter)
    result = picard_solve(problem, cfg, scfg)

    doc = {"params": {**_problem_params(args), "B": args.boundary_value,
                      "F": args.load_source, "K": args.lipschitz_k,
                      "nodes": args.nodes, "grid": args.grid,
                      "tol": args.tol, "max_iter": args.max_iter},
           "result": {"iterations": result.iterations,
                      "final_delta": result.final_delta,
                      "contraction_estimate": result.contraction_estimate,
                      "converged": result.converged}}
    if args.lipschitz_k is not None:
        cert = certify_uniqueness(problem.order, problem.interval, args.lipschitz_k)
        doc["certificate"] = cert.to_dict()

    xs = result.solution.nodes
    us = result.solution.values
    if args.with_log_coordinate:
        header = ("x", "u", "t")
        ts = np.log(xs / problem.interval.a)
        rows = [(float(x), float(u), float(t)) for x, u, t in zip(xs, us, ts)]
        doc["table"] = [{"x": r[0], "u": r[1], "t": r[2]} for r in rows]
    else:
        header = ("x", "u")
        rows = [(float(x), float(u)) for x, u in zip(xs, us)]
        doc["table"] = [{"x": r[0], "u": r[1]} for r in rows]

    lines = [f"iterations  = {result.iterations}",
             f"final delta = {_fmt(result.final_delta, 10)}",
             f"converged   = {result.converged}",
             "",
             "  ".join(f"{h:>22}" for h in header)]
    lines += ["  ".join(f"{_fmt(v, 10):>22}" for v in row) for row in rows]
    out.emit(doc, lines, csv_rows=rows, csv_header=header)
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def cmd_green(args, out: _Output) -> int:
    kernel = GreenKernel(Order(args.sigma), Interval(args.a, args.b))
    params = _problem_params(args)
    if args.tau is not None and args.x is None:
        raise DomainError("--tau requires --x")
    if args.x is not None and args.tau is not None:
        value = green_eval(kernel, args.x, args.tau)
        doc = {"params": {**params, "x": args.x, "tau": args.tau},
               "result": {"green_value": value}}
        lines = [f"G(x, tau)   = {_fmt(value, 10)}"]
    elif args.x is not None:
        value = green_row_integral(kernel, args.x)
        doc = {"params": {**params, "x": args.x},
               "result": {"row_integral": value}}
        lines = [f"row integral = {_fmt(value, 10)}"]
    else:
        xstar = green_argmax(kernel)
        peak = green_max_integral(kernel)
        doc = {"params": params,
               "result": {"argmax": xstar, "max_integral": peak}}
        lines = [f"argmax x*    = {_fmt(xstar, 10)}",
                 f"max integral = {_fmt(peak, 10)}"]
    out.emit(doc, lines)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, 0 on --help; keep its convention.
        return int(exc.code or 0)
    out = _Output(args)
    try:
        return args.handler(args, out)
    except ParseError as exc:
        print(f"error: invalid expression: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (DomainError, GridMismatchError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except EvaluationError as exc:
        print(f"error: evaluation failed: {exc}", file=sys.stderr)
        return EXIT_EVALUATION


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
