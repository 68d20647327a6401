# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Bundled diagnostics of one solution and the outcome of a check."""

from __future__ import annotations

import logging
import typing as t

import pydantic

from .. import model as _model
from ..bvp_solver import SolveResult
from .extrema import ExtremaReport, classify_extrema
from .qualitative import (
    AprioriReport,
    BoundsReport,
    MonotonicityReport,
    check_apriori,
    check_bounds,
    check_monotonicity,
)
from .weyl import WeylReport, weyl_estimates

__all__ = ["CheckOutcome", "DiagnosticsBundle", "run_diagnostics"]

logger = logging.getLogger(__name__)


class CheckOutcome(pydantic.BaseModel):
    """Result of one named verification check."""

    model_config = pydantic.ConfigDict(frozen=True)

    name: str
    hard: bool
    """Hard checks fail a verification run, soft checks only report."""
    passed: bool
    margin: float | None = None
    """Signed distance to the threshold; negative on failure."""
    detail: str = ""
    skipped: bool = False
    """The hypotheses of the check are not met for this solution."""

    @property
    def failed(self) -> bool:
        return self.hard and not self.skipped and not self.passed

    def render(self) -> str:
        if self.skipped:
            status = "skip"
        elif self.passed:
            status = "pass"
        else:
            status = "FAIL" if self.hard else "warn"
        margin = "" if self.margin is None else f"{self.margin:+.3e}"
        kind = "hard" if self.hard else "soft"
        head = f"{status:<5}{kind:<5}{self.name:<28}"
        return f"{head}{margin:>11}  {self.detail}"


class DiagnosticsBundle(pydantic.BaseModel):
    """Every diagnostic report of one converged solution."""

    model_config = pydantic.ConfigDict(frozen=True)

    symmetry: _model.SymmetryClass
    monotonicity: MonotonicityReport
    bounds: BoundsReport
    apriori: AprioriReport
    weyl: WeylReport
    extrema: ExtremaReport | None = None
    """Only for the reduced classes."""


def run_diagnostics(
    result: SolveResult, *, decay_start: float | None = None
) -> DiagnosticsBundle:
    """Run every single-solution diagnostic on ``result``."""
    params = result.params
    extrema = None
    if params.symmetry is not _model.SymmetryClass.FULL:
        extrema = classify_extrema(result, params)
    weyl_kwargs: dict[str, t.Any] = {}
    if decay_start is not None:
        weyl_kwargs["decay_start"] = decay_start
    bundle = DiagnosticsBundle(
        symmetry=params.symmetry,
        monotonicity=check_monotonicity(result),
        bounds=check_bounds(result, params=params),
        apriori=check_apriori(result),
        weyl=weyl_estimates(result, **weyl_kwargs),
        extrema=extrema,
    )
    logger.debug("Diagnostics finished for class %s", params.symmetry.value)
    return bundle
