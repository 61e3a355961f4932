"""Batch command line front end.

Subcommands:

    gen     write a seeded instance file (JSON)
    solve   sample a solution trajectory with residual columns (CSV or JSON)
    verify  run identity suites and report a JSON pass/fail table
    series  dump the power-series coefficients of the bounded-side solution

Exit codes: 0 on success, 1 when a residual or check exceeds its tolerance,
2 on usage, file or validation errors. Instance files stream through '-'
(stdin for reading); outputs go to stdout unless --output is given, in which
case the file is written atomically. BRATU_THREADS > 1 enables threaded
evaluation over grid points.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from functools import partial

import numpy as np

from . import bdi, ci, domains, instances, lagrangian, verify
from .bdi import BdiGenerator
from .ci import CiGenerator
from .errors import (
    ConsistencyError,
    PointAtInfinityError,
    PreconditionError,
    SpdLossError,
    ValidationError,
)
from .trajectory import Trajectory, uniform_grid


def _worker_count() -> int:
    raw = os.environ.get("BRATU_THREADS", "").strip()
    if not raw:
        return 1
    try:
        count = int(raw)
    except ValueError as exc:
        raise ValidationError(f"BRATU_THREADS must be an integer, got {raw!r}") from exc
    return max(1, count)


def grid_map(fn, values):
    """Apply fn over grid values, threaded when BRATU_THREADS asks for it."""
    workers = _worker_count()
    if workers == 1:
        return [fn(v) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, values))


def _emit(text: str, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _read_instance(ref):
    text = sys.stdin.read() if ref == "-" else open(ref, encoding="utf-8").read()
    data = instances.loads_instance(text)
    return data, instances.generator_from_dict(data)


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _trajectory_csv(traj: Trajectory, header: dict) -> str:
    n = traj.h.shape[1]
    lines = [f"# {key}: {json.dumps(value)}" for key, value in header.items()]
    cols = ["s"]
    cols += [f"h_{i}_{j}" for i in range(n) for j in range(n)]
    cols += [f"residual_{name}" for name in traj.residuals]
    lines.append(",".join(cols))
    for k, s in enumerate(traj.s):
        row = [_fmt(float(s))]
        row += [_fmt(float(v)) for v in traj.h[k].reshape(-1)]
        row += [_fmt(float(col[k])) for col in traj.residuals.values()]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _trajectory_json(traj: Trajectory, header: dict) -> str:
    n = traj.h.shape[1]
    cols = ["s"]
    cols += [f"h_{i}_{j}" for i in range(n) for j in range(n)]
    cols += [f"residual_{name}" for name in traj.residuals]
    rows = []
    for k, s in enumerate(traj.s):
        row = [float(s)]
        row += [float(v) for v in traj.h[k].reshape(-1)]
        row += [float(col[k]) for col in traj.residuals.values()]
        rows.append(row)
    doc = {"header": header, "columns": cols, "rows": rows}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _cmd_gen(args) -> int:
    if args.n < 1:
        raise ValidationError("--n must be at least 1")
    if args.type == "bdi":
        r = 0 if args.r is None else args.r
        if r < 0:
            raise ValidationError("--r must be nonnegative")
        gen = instances.random_bdi(args.n, r, args.seed, args.scale)
    else:
        if args.r is not None:
            raise ValidationError("--r applies only to bdi instances")
        gen = instances.random_ci(args.n, args.seed, args.scale)
    data = instances.instance_dict(gen, seed=args.seed)
    _emit(instances.dumps_instance(data), args.output)
    return 0


def _solve_trajectory(gen, normalization, grid) -> tuple[Trajectory, str]:
    """Build the trajectory and a description of the equation it satisfies."""
    if isinstance(gen, BdiGenerator):
        if normalization == "tilde":
            if np.max(np.abs(gen.c)) == 0.0:
                rows = grid_map(partial(bdi.bratu_point, gen), grid)
                traj = Trajectory(
                    grid,
                    np.array([h for h, _ in rows]),
                    {"bratu": np.array([res for _, res in rows])},
                )
                return traj, "(h' h^-1)' = (a a^T) h^-1"
            rows = grid_map(partial(lagrangian.el_point, gen), grid)
            traj = Trajectory(
                grid,
                np.array([h for h, _ in rows]),
                {
                    "eq_h": np.array([r[0] for _, r in rows]),
                    "eq_n1": np.array([r[1] for _, r in rows]),
                    "eq_n2": np.array([r[2] for _, r in rows]),
                },
            )
            return traj, (
                "(h' h^-1)' = h n1' n1'^T - c h^-1 c h^-1; "
                "h n1' + c n1 = a; h m^T h = c"
            )
        if np.max(np.abs(gen.c)) != 0.0:
            raise PreconditionError("delta normalization needs c = 0")
        rows = grid_map(partial(domains.delta_bratu_point, gen), grid)
        traj = Trajectory(
            grid,
            np.array([h for h, _ in rows]),
            {"bratu": np.array([res for _, res in rows])},
        )
        return traj, "(h' h^-1)' = 2 (a a^T) h^-1"
    if isinstance(gen, CiGenerator):
        if normalization == "tilde":
            rows = grid_map(partial(ci.bratu_point, gen), grid)
        else:
            rows = grid_map(partial(ci.kernel_point, gen), grid)
        traj = Trajectory(
            grid,
            np.array([h for h, _ in rows]),
            {"ci": np.array([res for _, res in rows])},
        )
        return traj, "(h' h^-1)' = (c h^-1)^2"
    raise ValidationError(f"unsupported generator {type(gen).__name__}")


def _cmd_solve(args) -> int:
    data, gen = _read_instance(args.instance)
    grid = uniform_grid(args.s_max, args.steps)
    traj, equation = _solve_trajectory(gen, args.normalization, grid)
    header = {
        "instance": data,
        "s_max": args.s_max,
        "steps": args.steps,
        "normalization": args.normalization,
        "equation": equation,
        "tolerance": args.tol,
    }
    if args.out == "csv":
        text = _trajectory_csv(traj, header)
    else:
        text = _trajectory_json(traj, header)
    _emit(text, args.output)
    return 0 if traj.max_residual() <= args.tol else 1


def _cmd_verify(args) -> int:
    data, gen = _read_instance(args.instance)
    checks = verify.run_suite(gen, args.suite, seed=args.seed)
    passed = all(check.passed for check in checks)
    doc = {
        "instance": data,
        "suite": args.suite,
        "checks": [check.as_dict() for check in checks],
        "passed": passed,
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.output)
    return 0 if passed else 1


def _cmd_series(args) -> int:
    data, gen = _read_instance(args.instance)
    if not isinstance(gen, BdiGenerator):
        raise ValidationError("series output needs a bdi instance")
    bounded = domains.BoundedGenerator.from_bdi(gen)
    coeffs = domains.power_series_h(bounded, args.order)
    factors = domains.generator_svd(bounded)
    doc = {
        "instance": data,
        "order": args.order,
        "sigma": [float(v) for v in factors.sigma],
        "coefficients": [
            {
                "power": k,
                "parity": "even" if k % 2 == 0 else "odd",
                "matrix": coeff.tolist(),
            }
            for k, coeff in enumerate(coeffs)
        ],
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matbratu",
        description="Exponential solutions of the matrix Bratu equation on "
        "symmetric domains, with verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="write a seeded instance file")
    p_gen.add_argument("--type", choices=("bdi", "ci"), required=True)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--r", type=int, default=None)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--scale", type=float, default=1.0)
    p_gen.add_argument("--output", default=None)
    p_gen.set_defaults(func=_cmd_gen)

    p_solve = sub.add_parser("solve", help="sample a trajectory with residuals")
    p_solve.add_argument("instance", help="instance file path or '-' for stdin")
    p_solve.add_argument("--s-max", type=float, default=1.0)
    p_solve.add_argument("--steps", type=int, default=20)
    p_solve.add_argument(
        "--normalization", choices=("tilde", "delta"), default="tilde"
    )
    p_solve.add_argument("--out", choices=("csv", "json"), default="csv")
    p_solve.add_argument("--tol", type=float, default=1e-8)
    p_solve.add_argument("--output", default=None)
    p_solve.set_defaults(func=_cmd_solve)

    p_verify = sub.add_parser("verify", help="run identity suites")
    p_verify.add_argument("instance")
    p_verify.add_argument("--suite", choices=verify.SUITES, default="all")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--output", default=None)
    p_verify.set_defaults(func=_cmd_verify)

    p_series = sub.add_parser("series", help="dump power-series coefficients")
    p_series.add_argument("instance")
    p_series.add_argument("--order", type=int, default=12)
    p_series.add_argument("--output", default=None)
    p_series.set_defaults(func=_cmd_series)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValidationError, PointAtInfinityError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConsistencyError, SpdLossError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
