# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Command line interface.

Subcommands: ``solve``, ``sweep``, ``verify``, ``compare`` and
``export``. Exit codes:

====  ==========================================
0     success
1     a hard verification check failed
2     the solver did not converge
3     invalid input or configuration
4     file could not be read, written or parsed
====  ==========================================

The log level is taken from the ``CCE_LOG`` environment variable
(``error``, ``warn``, ``info`` or ``debug``).
"""

from __future__ import annotations

import argparse
import collections.abc as cabc
import concurrent.futures
import itertools
import logging
import os
import pathlib
import sys
import typing as t

import typing_extensions as te

from . import __version__, bvp_solver, config, errors, serializers
from . import model as _model
from .checks import (
    DUAL_METHOD_TOL,
    dual_method_difference,
    verification_battery,
)
from .diagnostics import check_bounds, compare_solutions, weyl_estimates

__all__ = ["EXIT_CODES", "main"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_SOLVER = 2
EXIT_INPUT = 3
EXIT_IO = 4
EXIT_CODES = {
    "ok": EXIT_OK,
    "verify": EXIT_VERIFY,
    "solver": EXIT_SOLVER,
    "input": EXIT_INPUT,
    "io": EXIT_IO,
}
"""Exit code contract."""

LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}
LOG_ENV = "CCE_LOG"

SOLVER_FAILURES = (
    errors.StepCollapseError,
    errors.NonConvergenceError,
    errors.SingularJacobianError,
    errors.PositivityLossError,
    errors.BranchViolationError,
)

RESULT_FILE = "result.json"
PROFILE_FILE = "profile.csv"
PATH_FILE = "continuation.csv"
EXPANSIONS_FILE = "expansions.json"
SWEEP_FILE = "sweep"
COMPARE_FILE = "compare.json"

PATH_COLUMNS = ("t", "t1_0", "t2_0", "t3_0", "K0", "iterations", "residual")
SWEEP_COLUMNS = (
    "lambda1",
    "lambda2",
    "lambda3",
    "lambda4",
    "class",
    "converged",
    "last_good_t",
    "K0",
    "eps_obs",
    "t_upper_margin",
    "y1prime_cap_margin",
    "K0_margin",
    "error",
)


SweepRow = te.TypedDict(
    "SweepRow",
    {
        "lambda1": str,
        "lambda2": str,
        "lambda3": str,
        "lambda4": str,
        "class": str,
        "converged": bool,
        "last_good_t": str,
        "K0": str,
        "eps_obs": str,
        "t_upper_margin": str,
        "y1prime_cap_margin": str,
        "K0_margin": str,
        "error": str,
    },
    total=False,
)
"""Summary row of one sweep point; floats as decimal strings."""


class _ArgumentParser(argparse.ArgumentParser):
    """Report usage errors as invalid input instead of exiting."""

    @te.override
    def error(self, message: str) -> t.NoReturn:
        raise errors.InvalidParameterError(f"{self.prog}: {message}")


def configure_logging(environ: cabc.Mapping[str, str] | None = None) -> None:
    environ = os.environ if environ is None else environ
    name = environ.get(LOG_ENV, "warn").strip().lower()
    level = LOG_LEVELS.get(name)
    logging.basicConfig(
        level=level or logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if level is None:
        logger.warning("Unknown %s=%r, using 'warn'", LOG_ENV, name)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=pathlib.Path, help="config file")
    parser.add_argument("--k", type=int, help="quaternionic rank, n = 4k+3")
    parser.add_argument(
        "--lambda", dest="lambda_", metavar="A,B,C,D", help="λ₁..λ₄"
    )
    parser.add_argument(
        "--class",
        dest="symmetry",
        choices=("auto", "full", "sp1", "u1"),
        help="symmetry class",
    )
    parser.add_argument("--mesh", type=int, help="mesh intervals N")
    parser.add_argument("--tol", type=float, help="Newton tolerance")
    parser.add_argument("--steps", type=int, help="continuation steps")
    parser.add_argument("--seed", type=int, help="perturbation seed")
    parser.add_argument("--out", type=pathlib.Path, help="output directory")
    parser.add_argument("--format", choices=("json", "csv", "both"))
    parser.add_argument(
        "--force",
        action="store_true",
        default=None,
        help="accept mismatched manifests",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="sp-fillings",
        description=(
            "Solve and verify Sp(k+1)-invariant conformally compact"
            " Einstein fillings."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve by continuation")
    _common(solve)
    solve.add_argument(
        "--shooting",
        action="store_true",
        default=None,
        help="also run the shooting oracle",
    )
    solve.add_argument(
        "--expansions",
        action="store_true",
        default=None,
        help="also write the endpoint expansions",
    )

    sweep = sub.add_parser("sweep", help="solve over a grid of data")
    _common(sweep)
    sweep.add_argument(
        "--grid", metavar="A,B,...", help="values of λ₁..λ₃"
    )
    sweep.add_argument("--workers", type=int, help="worker processes")

    verify = sub.add_parser("verify", help="run the diagnostics battery")
    _common(verify)
    verify.add_argument("--input", type=pathlib.Path, required=True)
    verify.add_argument("--perturbations", type=int)
    verify.add_argument("--shooting", action="store_true", default=None)

    compare = sub.add_parser("compare", help="compare two results")
    compare.add_argument("file_a", type=pathlib.Path)
    compare.add_argument("file_b", type=pathlib.Path)
    compare.add_argument("--out", type=pathlib.Path)

    export = sub.add_parser("export", help="convert a result")
    export.add_argument("--input", type=pathlib.Path, required=True)
    export.add_argument("--out", type=pathlib.Path)
    export.add_argument("--format", choices=("json", "csv", "both"))
    export.add_argument("--expansions", action="store_true", default=None)
    return parser


def _run_config(args: argparse.Namespace) -> config.RunConfig:
    base = (
        config.load_config(args.config)
        if getattr(args, "config", None)
        else config.RunConfig()
    )

    def get(name: str) -> t.Any:
        return getattr(args, name, None)

    return base.with_overrides(
        {
            "model": {
                "k": get("k"),
                "lambda": get("lambda_"),
                "class": get("symmetry"),
            },
            "solver": {"mesh_size": get("mesh"), "tol": get("tol")},
            "continuation": {"steps": get("steps")},
            "output": {
                "out": get("out"),
                "format": get("format"),
                "expansions": get("expansions"),
            },
            "verify": {
                "seed": get("seed"),
                "perturbations": get("perturbations"),
                "shooting": get("shooting"),
                "force": get("force"),
            },
            "sweep": {"grid": get("grid"), "workers": get("workers")},
        }
    )


def _wants(fmt: str, kind: str) -> bool:
    return fmt in {kind, "both"}


def _write_result(
    result: bvp_solver.SolveResult, cfg: config.RunConfig
) -> list[pathlib.Path]:
    out = cfg.output.out
    written = []
    if _wants(cfg.output.format, "json"):
        written.append(serializers.dump_result(result, out / RESULT_FILE))
    if _wants(cfg.output.format, "csv"):
        written.append(
            serializers.write_csv(
                out / PROFILE_FILE, serializers.profile_rows(result)
            )
        )
    if cfg.output.expansions:
        written.append(
            serializers.write_json(
                out / EXPANSIONS_FILE, serializers.expansions_to_dict(result)
            )
        )
    return written


def _path_rows(
    path: bvp_solver.ContinuationPath,
) -> list[dict[str, t.Any]]:
    return [
        {
            "t": repr(step.t),
            "t1_0": repr(step.boundary_data.t0[0]),
            "t2_0": repr(step.boundary_data.t0[1]),
            "t3_0": repr(step.boundary_data.t0[2]),
            "K0": repr(step.K0),
            "iterations": step.result.iterations,
            "residual": repr(step.result.residual_solved),
        }
        for step in path.steps
    ]


def _print_summary(result: bvp_solver.SolveResult) -> None:
    params = result.params
    print(f"k={params.k} n={params.n} class={params.symmetry.value}")
    print(f"lambda={', '.join(map(repr, params.lambda_))}")
    print(f"K0={result.K0!r}")
    print(f"residual_solved={result.residual_solved:.3e}")
    print(
        "residual_extra="
        + ", ".join(f"{v:.3e}" for v in result.residual_extra)
    )
    print(f"iterations={result.iterations}")


def cmd_solve(cfg: config.RunConfig) -> int:
    """Solve the configured problem and write its artifacts."""
    params = cfg.params()
    try:
        path = bvp_solver.solve(params, cfg.solver, cfg.continuation)
    except errors.StepCollapseError as err:
        print(
            f"Continuation collapsed; last good t={err.last_good_t!r}",
            file=sys.stderr,
        )
        if err.path is not None and _wants(cfg.output.format, "csv"):
            serializers.write_csv(
                cfg.output.out / PATH_FILE, _path_rows(err.path), PATH_COLUMNS
            )
        return EXIT_SOLVER
    result = path.final
    written = _write_result(result, cfg)
    if _wants(cfg.output.format, "csv"):
        written.append(
            serializers.write_csv(
                cfg.output.out / PATH_FILE, _path_rows(path), PATH_COLUMNS
            )
        )
    _print_summary(result)
    status = EXIT_OK
    if cfg.verify.shooting:
        status = _report_dual_method(result, cfg.verify.match_point)
    for file in written:
        logger.info("Wrote %s", file)
    return status


def _report_dual_method(
    result: bvp_solver.SolveResult, match_point: float
) -> int:
    try:
        diff = dual_method_difference(result, match_point)
    except errors.FillingsError as err:
        print(f"Shooting oracle failed: {err}", file=sys.stderr)
        return EXIT_VERIFY
    print(f"dual_method_sup={diff:.3e}")
    return EXIT_OK if diff <= DUAL_METHOD_TOL else EXIT_VERIFY


def sweep_point(
    k: int,
    lambda_: tuple[float, float, float, float],
    symmetry: str,
    solver: dict[str, t.Any],
    continuation: dict[str, t.Any],
) -> SweepRow:
    """Solve one sweep point and return its summary row.

    Failures are recorded in the row instead of raised.
    """
    row = SweepRow(
        lambda1=repr(lambda_[0]),
        lambda2=repr(lambda_[1]),
        lambda3=repr(lambda_[2]),
        lambda4=repr(lambda_[3]),
        converged=False,
    )
    try:
        params = _model.ModelParams.create(k, lambda_, symmetry)
        row["class"] = params.symmetry.value
        path = bvp_solver.solve(
            params,
            bvp_solver.SolveOptions.model_validate(solver),
            bvp_solver.ContinuationOptions.model_validate(continuation),
        )
    except errors.StepCollapseError as err:
        row["last_good_t"] = repr(err.last_good_t)
        row["error"] = str(err)
        return row
    except errors.FillingsError as err:
        row["error"] = str(err)
        return row
    result = path.final
    bounds = check_bounds(result)
    row.update(
        converged=True,
        last_good_t=repr(0.0),
        K0=repr(result.K0),
        eps_obs=repr(weyl_estimates(result).eps_obs),
        t_upper_margin=repr(bounds.t_upper_margin),
        y1prime_cap_margin=repr(bounds.y1prime_cap_margin),
        K0_margin=repr(result.K0 - bounds.K0_lower_bound),
    )
    return row


def _sweep_points(
    cfg: config.RunConfig,
) -> list[tuple[float, float, float, float]]:
    last = cfg.model.lambda_[3]
    return [
        (a, b, c, last)
        for a, b, c in itertools.product(cfg.sweep.grid, repeat=3)
    ]


def cmd_sweep(cfg: config.RunConfig) -> int:
    """Solve every point of the grid and write the summary table."""
    points = _sweep_points(cfg)
    if not points:
        raise errors.InvalidParameterError("The sweep grid is empty")
    solver = cfg.solver.model_dump()
    continuation = cfg.continuation.model_dump()
    args = [
        (cfg.model.k, lam, cfg.model.symmetry, solver, continuation)
        for lam in points
    ]
    workers = min(cfg.sweep.pool_size, len(points))
    logger.info("Sweeping %d points on %d workers", len(points), workers)
    if workers == 1:
        rows = [sweep_point(*a) for a in args]
    else:
        with concurrent.futures.ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(sweep_point, *zip(*args, strict=True)))

    out = cfg.output.out
    if _wants(cfg.output.format, "csv"):
        serializers.write_csv(out / f"{SWEEP_FILE}.csv", rows, SWEEP_COLUMNS)
    if _wants(cfg.output.format, "json"):
        serializers.write_json(out / f"{SWEEP_FILE}.json", {"rows": rows})
    converged = sum(bool(row["converged"]) for row in rows)
    for row in rows:
        lam = ",".join(
            (row["lambda1"], row["lambda2"], row["lambda3"], row["lambda4"])
        )
        status = row.get("K0", "") if row["converged"] else "failed"
        print(f"{lam:<40} {status}")
    print(f"{converged}/{len(rows)} points converged")
    return EXIT_OK if converged else EXIT_SOLVER


def cmd_verify(
    cfg: config.RunConfig,
    input_: pathlib.Path,
    *,
    problem_given: bool,
) -> int:
    """Run the verification battery on a stored result."""
    result, manifest = serializers.load_result(input_)
    if problem_given:
        serializers.check_manifest(
            manifest, cfg.params(), cfg.solver, force=cfg.verify.force
        )
    else:
        serializers.check_manifest(
            manifest, result.params, result.options, force=cfg.verify.force
        )
    outcomes = verification_battery(
        result,
        perturbations=cfg.verify.perturbations,
        seed=cfg.verify.seed,
        shooting=cfg.verify.shooting,
        match_point=cfg.verify.match_point,
        decay_start=cfg.verify.decay_start,
    )
    for outcome in outcomes:
        print(outcome.render())
    failed = [o for o in outcomes if o.failed]
    print(f"{len(outcomes) - len(failed)}/{len(outcomes)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_compare(
    file_a: pathlib.Path, file_b: pathlib.Path, out: pathlib.Path | None
) -> int:
    """Compare two stored results by the variation of their differences."""
    a, _ = serializers.load_result(file_a)
    b, _ = serializers.load_result(file_b)
    report = compare_solutions(a, b)
    if out is not None:
        serializers.write_json(
            out / COMPARE_FILE, report.model_dump(mode="json")
        )
    for j, v in enumerate(report.V, start=1):
        print(f"V(z{j}) = {v:.6e}")
    labels = ("V(z1) <= sum/n", "V(z2) bound", "V(z3) bound", "V(z4) bound")
    for label, flag in zip(labels, report.inequality_flags, strict=True):
        print(f"{label:<16} {'holds' if flag else 'violated'}")
    print(f"sup |z| = {report.sup_norm:.6e}")
    return EXIT_OK


def cmd_export(
    input_: pathlib.Path,
    out: pathlib.Path | None,
    fmt: str | None,
    expansions: bool,
) -> int:
    """Convert a stored result to CSV or JSON with a fresh manifest."""
    result, _ = serializers.load_result(input_)
    cfg = config.RunConfig().with_overrides(
        {
            "output": {
                "out": out,
                "format": fmt or "csv",
                "expansions": expansions,
            }
        }
    )
    for file in _write_result(result, cfg):
        print(file)
    return EXIT_OK


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "compare":
        return cmd_compare(args.file_a, args.file_b, args.out)
    if args.command == "export":
        return cmd_export(
            args.input, args.out, args.format, bool(args.expansions)
        )
    cfg = _run_config(args)
    if args.command == "solve":
        return cmd_solve(cfg)
    if args.command == "sweep":
        return cmd_sweep(cfg)
    problem_given = any(
        getattr(args, name) is not None for name in ("config", "k", "lambda_")
    )
    return cmd_verify(cfg, args.input, problem_given=problem_given)


def main(argv: cabc.Sequence[str] | None = None) -> int:
    """Run the command line interface and return the exit code."""
    configure_logging()
    try:
        args = build_parser().parse_args(argv)
        return _dispatch(args)
    except SOLVER_FAILURES as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO
    except errors.FillingsError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
