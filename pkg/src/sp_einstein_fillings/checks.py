# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Named verification checks and the battery that runs them.

Every entry of [CHECKS][sp_einstein_fillings.checks.CHECKS] turns the
diagnostics of one solution into a
[CheckOutcome][sp_einstein_fillings.diagnostics.CheckOutcome]. Hard
checks fail a verification run; they are skipped when the hypotheses of
the underlying statement are not met. Soft checks only report.
"""

from __future__ import annotations

import collections.abc as cabc
import logging

import numpy as np

from . import errors
from .bvp_solver import SolveResult, shooting_oracle
from .diagnostics import (
    NOISE_FLOOR,
    CheckOutcome,
    DiagnosticsBundle,
    profiles_on_mesh,
    run_diagnostics,
    uniqueness_probe,
)
from .endpoint_series import PARITY_RADIUS, parity_defect

__all__ = [
    "CHECKS",
    "DUAL_METHOD_TOL",
    "PARITY_TOL",
    "UNIQUENESS_TOL",
    "dual_method_difference",
    "verification_battery",
]

logger = logging.getLogger(__name__)

BOUND_SLACK = 1e-9
PARITY_TOL = 1e-5
"""Largest accepted scaled odd coefficient near ``x = 0``."""
PARITY_ORDERS = (1, 3, 5)
INTEGRAL_TOL = 1e-6
"""Largest accepted relative defect of the ``y₁'`` integral identity."""
DUAL_METHOD_TOL = 1e-6
UNIQUENESS_TOL = 1e-8

Check = cabc.Callable[[DiagnosticsBundle, SolveResult], CheckOutcome]


def _outcome(
    name: str,
    hard: bool,
    margin: float,
    detail: str = "",
    *,
    skipped: bool = False,
) -> CheckOutcome:
    return CheckOutcome(
        name=name,
        hard=hard,
        passed=margin >= 0,
        margin=margin,
        detail=detail,
        skipped=skipped,
    )


def check_residual(_: DiagnosticsBundle, result: SolveResult) -> CheckOutcome:
    margin = result.options.tol - result.residual_solved
    return _outcome(
        "residual", True, margin, f"residual {result.residual_solved:.3e}"
    )


def check_k0_range(_: DiagnosticsBundle, result: SolveResult) -> CheckOutcome:
    margin = min(result.K0, 1 + NOISE_FLOOR - result.K0)
    return _outcome("k0_range", True, margin, f"K0={result.K0:.12g}")


def check_y1_positive(
    bundle: DiagnosticsBundle, _: SolveResult
) -> CheckOutcome:
    report = bundle.monotonicity
    return CheckOutcome(
        name="y1prime_positive",
        hard=True,
        passed=report.y1_positive,
        margin=report.y1prime_min,
        detail=f"min y1'={report.y1prime_min:.3e}",
        skipped=not report.in_regime,
    )


def check_ratio_monotone(
    bundle: DiagnosticsBundle, _: SolveResult
) -> CheckOutcome:
    report = bundle.monotonicity
    changes = sum(
        r.sign_changes for r in report.ratio_signs if not r.excluded
    )
    excluded = [r.pair for r in report.ratio_signs if r.excluded]
    detail = f"{changes} sign changes"
    if excluded:
        detail += f", excluded {excluded}"
    return CheckOutcome(
        name="ratios_monotone",
        hard=True,
        passed=report.ratios_monotone,
        margin=float(-changes),
        detail=detail,
        skipped=not report.in_regime,
    )


def check_k_monotone(
    bundle: DiagnosticsBundle, _: SolveResult
) -> CheckOutcome:
    report = bundle.bounds
    return CheckOutcome(
        name="K_monotone",
        hard=True,
        passed=report.K_monotone,
        margin=bundle.monotonicity.y1prime_min + NOISE_FLOOR,
    )


def check_k_le_one(
    bundle: DiagnosticsBundle, _: SolveResult
) -> CheckOutcome:
    report = bundle.bounds
    return CheckOutcome(
        name="K_le_one",
        hard=True,
        passed=report.K_le_one,
        margin=1 + NOISE_FLOOR - report.K_range[1],
        detail=f"K in [{report.K_range[0]:.12g}, {report.K_range[1]:.12g}]",
    )


def check_t_upper(bundle: DiagnosticsBundle, _: SolveResult) -> CheckOutcome:
    report = bundle.bounds
    return _outcome(
        "t_upper_bound",
        True,
        report.t_upper_margin + BOUND_SLACK,
        f"max t={max(report.t_max):.9g} cap={report.bound_3_6:.9g}",
        skipped=not report.in_regime,
    )


def check_y1prime_cap(
    bundle: DiagnosticsBundle, _: SolveResult
) -> CheckOutcome:
    report = bundle.bounds
    return _outcome(
        "y1prime_cap",
        True,
        report.y1prime_cap_margin + BOUND_SLACK,
        skipped=not report.in_regime,
    )


def check_k0_lower_bound(
    bundle: DiagnosticsBundle, result: SolveResult
) -> CheckOutcome:
    report = bundle.bounds
    return _outcome(
        "K0_lower_bound",
        True,
        result.K0 - report.K0_lower_bound,
        f"K0={result.K0:.12g} bound={report.K0_lower_bound:.12g}",
        skipped=not report.in_regime,
    )


def check_upsilon(bundle: DiagnosticsBundle, _: SolveResult) -> CheckOutcome:
    return _outcome("upsilon_margin", False, bundle.bounds.upsilon_margin)


def check_integral_identity(
    bundle: DiagnosticsBundle, _: SolveResult
) -> CheckOutcome:
    defect = bundle.apriori.y1_integral_defect
    return _outcome(
        "y1_integral_identity",
        False,
        INTEGRAL_TOL - defect,
        f"relative defect {defect:.3e}",
    )


def check_apriori(bundle: DiagnosticsBundle, _: SolveResult) -> CheckOutcome:
    constants = bundle.apriori.constants
    return CheckOutcome(
        name="apriori_constants",
        hard=False,
        passed=bool(np.all(np.isfinite(constants))),
        margin=None,
        detail="C=" + ", ".join(f"{c:.3g}" for c in constants),
    )


def check_weyl(bundle: DiagnosticsBundle, _: SolveResult) -> CheckOutcome:
    report = bundle.weyl
    return _outcome(
        "weyl_cap",
        False,
        report.weyl_cap - report.eps_obs,
        f"eps_obs={report.eps_obs:.3e} at x={report.x_max:.4f}",
    )


def check_extrema(
    bundle: DiagnosticsBundle, _: SolveResult
) -> CheckOutcome:
    report = bundle.extrema
    if report is None:
        return CheckOutcome(
            name="extrema", hard=True, passed=True, skipped=True
        )
    margins = [r.margin for r in report.records] + [
        g.margin for g in report.global_checks if g.applicable
    ]
    return CheckOutcome(
        name="extrema",
        hard=True,
        passed=report.all_hold,
        margin=min(margins, default=None),
        detail=f"{len(report.records)} interior extrema",
    )


def check_sign_rule(
    bundle: DiagnosticsBundle, _: SolveResult
) -> CheckOutcome:
    report = bundle.extrema
    if report is None or report.sign_rule is None:
        return CheckOutcome(
            name="u1_sign_rule", hard=False, passed=True, skipped=True
        )
    rule = report.sign_rule
    return CheckOutcome(
        name="u1_sign_rule",
        hard=False,
        passed=rule.consistent,
        detail=(
            f"predicted y2''(0)={rule.predicted:.3e},"
            f" observed {rule.observed:.3e}"
        ),
    )


def check_parity(_: DiagnosticsBundle, result: SolveResult) -> CheckOutcome:
    orders = [p for p in PARITY_ORDERS if p < result.params.n]
    cap = float(result.grid.x[result.window[0]])
    try:
        defects = parity_defect(
            result.grid, orders, rho=max(PARITY_RADIUS, 2 * cap)
        )
    except errors.InsufficientResolutionError as err:
        return CheckOutcome(
            name="parity",
            hard=False,
            passed=True,
            skipped=True,
            detail=str(err),
        )
    return _outcome(
        "parity",
        False,
        PARITY_TOL - float(np.max(defects)),
        "defects " + ", ".join(f"{d:.2e}" for d in defects),
    )


CHECKS: dict[str, Check] = {
    "residual": check_residual,
    "k0_range": check_k0_range,
    "y1prime_positive": check_y1_positive,
    "ratios_monotone": check_ratio_monotone,
    "K_monotone": check_k_monotone,
    "K_le_one": check_k_le_one,
    "t_upper_bound": check_t_upper,
    "y1prime_cap": check_y1prime_cap,
    "K0_lower_bound": check_k0_lower_bound,
    "upsilon_margin": check_upsilon,
    "y1_integral_identity": check_integral_identity,
    "apriori_constants": check_apriori,
    "weyl_cap": check_weyl,
    "extrema": check_extrema,
    "u1_sign_rule": check_sign_rule,
    "parity": check_parity,
}
"""Check registry, in reporting order."""


def dual_method_difference(
    result: SolveResult, match_point: float = 0.5
) -> float:
    """Return the sup-norm difference to the shooting solution.

    The shooting starts from the expansion data of ``result`` and
    converges to its own matched solution.

    Raises
    ------
    FillingsError
        If the shooting fails.
    """
    params = result.params
    origin = result.origin_params
    other = shooting_oracle(
        params.boundary_data(),
        params,
        match_point,
        result.options,
        initial=[origin[0], *origin[2:], *result.center_params],
    )
    y, _ = profiles_on_mesh(other.grid, result.grid.x, labelled=False)
    return float(np.max(np.abs(y - result.grid.y)))


def _shooting_outcome(result: SolveResult, match_point: float) -> CheckOutcome:
    try:
        diff = dual_method_difference(result, match_point)
    except errors.FillingsError as err:
        logger.warning("Shooting oracle failed: %s", err)
        return CheckOutcome(
            name="dual_method", hard=True, passed=False, detail=str(err)
        )
    return _outcome(
        "dual_method",
        True,
        DUAL_METHOD_TOL - diff,
        f"sup |y_coll - y_shoot| = {diff:.3e}",
    )


def _uniqueness_outcome(
    result: SolveResult, count: int, seed: int
) -> CheckOutcome:
    report = uniqueness_probe(result, count, seed)
    margin = UNIQUENESS_TOL - max(
        report.max_pairwise_sup, report.max_variation
    )
    return CheckOutcome(
        name="uniqueness_probe",
        hard=False,
        passed=margin >= 0 and report.converged == count,
        margin=margin,
        detail=(
            f"{report.converged}/{count} converged,"
            f" max sup {report.max_pairwise_sup:.3e},"
            f" max V {report.max_variation:.3e}"
        ),
    )


def verification_battery(
    result: SolveResult,
    *,
    names: cabc.Iterable[str] | None = None,
    perturbations: int = 0,
    seed: int = 0,
    shooting: bool = False,
    match_point: float = 0.5,
    decay_start: float | None = None,
) -> list[CheckOutcome]:
    """Run the registered checks and the optional probes.

    Parameters
    ----------
    result
        A converged solution.
    names
        Registered checks to run; all by default.
    perturbations
        Number of perturbed restarts of the uniqueness probe; 0 skips
        the probe.
    seed
        Seed of the perturbations.
    shooting
        Compare with the shooting oracle.
    match_point
        Matching abscissa of the shooting oracle.
    decay_start
        Left end of the Weyl decay fit.

    Raises
    ------
    InvalidParameterError
        If an unknown check name is requested.
    """
    selected = list(CHECKS) if names is None else list(names)
    unknown = [name for name in selected if name not in CHECKS]
    if unknown:
        raise errors.InvalidParameterError(
            f"Unknown checks: {', '.join(unknown)}"
        )
    bundle = run_diagnostics(result, decay_start=decay_start)
    outcomes = [CHECKS[name](bundle, result) for name in selected]
    if shooting:
        outcomes.append(_shooting_outcome(result, match_point))
    if perturbations > 0:
        outcomes.append(_uniqueness_outcome(result, perturbations, seed))
    failed = [o.name for o in outcomes if o.failed]
    if failed:
        logger.warning("Failed hard checks: %s", ", ".join(failed))
    return outcomes
