# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Interior extrema of the anisotropy ratios of reduced classes.

Extrema of ``t_i`` are the sign changes of ``y_{i+1}'``. They are
located as roots of the Hermite interpolant of ``y_{i+1}'`` built from
the stored first and second derivatives, and classified by the sign of
the interpolated second derivative at the root. Roots where the
derivative stays within the noise floor are dropped.

For the Sp(1) class (unknowns ``K, t₁``):

- a local maximum of ``t₁`` lies in ``[2/(n+3), 1]``;
- a local minimum of ``t₁`` satisfies ``t₁ <= 2/(n+3)``;
- ``t₁ <= max{1, t₁(0)}`` and ``t₁ > (6/(n(n−1)))^{n/(n−3)}`` everywhere.

For the U(1) class (unknowns ``K, t₁, t₂ = t₃``), with ``t₁*`` the
value at which the ``t₁`` forcing vanishes:

- at a local maximum of ``t₁``: ``t₁ <= t₁*``, at a minimum ``t₁ >= t₁*``;
- at a local maximum of ``t₂``: ``t₂ <= 1``;
- at a local minimum of ``t₂``: ``t₂ < 4/(n+1)`` and
  ``t₁ <= (4t₂ − (n+1)t₂²)/(2t₂ + 2)``;
- if ``t₂`` is monotone, ``t₁*`` is nondecreasing and
  ``t₁ >= min{t₁(0), t₁*(0)}``;
- ``y₂''(0) = −8/(n−2) (K⁻¹t₁t₂²)^{1/n} (n−1+2t₂⁻²)(t₁ − t₁*)`` at
  ``x = 0``.
"""

from __future__ import annotations

import logging
import typing as t

import numpy as np
import numpy.typing as npt
import pydantic
from scipy import interpolate

from .. import errors
from .. import model as _model
from ..bvp_solver import SolveResult
from .variation import NOISE_FLOOR

__all__ = [
    "ExtremaReport",
    "ExtremumRecord",
    "GlobalCheck",
    "SignRule",
    "classify_extrema",
    "locate_extrema",
]

logger = logging.getLogger(__name__)

Array: t.TypeAlias = npt.NDArray[np.float64]

SLACK = 1e-9
INITIAL_NODES = 3
"""Number of interior nodes next to ``x = 0`` that decide the initial
slope sign."""


class ExtremumRecord(pydantic.BaseModel):
    """One interior local extremum and the inequality it must satisfy."""

    model_config = pydantic.ConfigDict(frozen=True)

    component: str
    """``"t1"`` or ``"t2"`` in canonical labelling."""
    kind: t.Literal["max", "min"]
    x: float
    value: float
    rule: str
    """Human readable form of the checked inequality."""
    margin: float
    """Nonnegative if the inequality holds."""

    @property
    def holds(self) -> bool:
        return self.margin >= -SLACK


class GlobalCheck(pydantic.BaseModel):
    """A bound that must hold on all of ``[0, 1]``."""

    model_config = pydantic.ConfigDict(frozen=True)

    rule: str
    margin: float
    applicable: bool = True
    """False if the hypotheses of the bound are not met."""

    @property
    def holds(self) -> bool:
        return not self.applicable or self.margin >= -SLACK


class SignRule(pydantic.BaseModel):
    """Initial curvature of ``y₂`` for the U(1) class."""

    model_config = pydantic.ConfigDict(frozen=True)

    t1_star_0: float
    predicted: float
    """``y₂''(0)`` from the closed form."""
    observed: float
    """``y₂''(0)`` of the solution."""
    initial_slope_sign: int
    """Sign of ``y₂'`` on the first interior nodes, 0 if mixed."""

    @property
    def consistent(self) -> bool:
        """The observed curvature and slope agree with the prediction."""
        if abs(self.predicted) <= NOISE_FLOOR:
            return True
        expected = int(np.sign(self.predicted))
        return (
            int(np.sign(self.observed)) == expected
            and self.initial_slope_sign == expected
        )


class ExtremaReport(pydantic.BaseModel):
    """Interior extrema of a reduced-class solution."""

    model_config = pydantic.ConfigDict(frozen=True)

    symmetry: _model.SymmetryClass
    records: tuple[ExtremumRecord, ...]
    global_checks: tuple[GlobalCheck, ...]
    sign_rule: SignRule | None = None

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.records) and all(
            g.holds for g in self.global_checks
        )


def locate_extrema(
    x: Array, dy: Array, ddy: Array
) -> list[tuple[float, t.Literal["max", "min"]]]:
    """Return the interior extrema of a profile from ``y'`` and ``y''``."""
    slope = interpolate.CubicHermiteSpline(x, dy, ddy)
    curvature = slope.derivative()
    roots = slope.roots(extrapolate=False)
    roots = np.unique(roots[np.isfinite(roots) & (roots > 0) & (roots < 1)])
    found: list[tuple[float, t.Literal["max", "min"]]] = []
    for root in roots:
        cell = np.searchsorted(x, root)
        neighbourhood = dy[max(cell - 2, 0) : cell + 2]
        if np.max(np.abs(neighbourhood)) <= NOISE_FLOOR:
            continue
        c = float(curvature(root))
        if abs(c) <= NOISE_FLOOR:
            continue
        found.append((float(root), "max" if c < 0 else "min"))
    return found


def _sp1(
    result: SolveResult,
) -> tuple[list[ExtremumRecord], list[GlobalCheck]]:
    grid = result.grid
    n = result.params.n
    threshold = _model.sp1_extremum_threshold(n)
    spline = grid.spline()
    records = []
    for root, kind in locate_extrema(grid.x, grid.dy[1], grid.ddy[1]):
        t1 = float(np.exp(spline(root)[1]))
        if kind == "max":
            margin = min(t1 - threshold, 1 - t1)
            rule = "2/(n+3) <= t1 <= 1"
        else:
            margin = threshold - t1
            rule = "t1 <= 2/(n+3)"
        records.append(
            ExtremumRecord(
                component="t1",
                kind=kind,
                x=root,
                value=t1,
                rule=rule,
                margin=margin,
            )
        )
    t1 = np.exp(grid.y[1])
    checks = [
        GlobalCheck(
            rule="t1 <= max(1, t1(0))",
            margin=float(max(1.0, t1[0]) - np.max(t1)),
        ),
        GlobalCheck(
            rule="t1 > (6/(n(n-1)))^(n/(n-3))",
            margin=float(np.min(t1) - _model.sp1_t1_lower_bound(n)),
        ),
    ]
    return records, checks


def _u1(
    result: SolveResult,
) -> tuple[list[ExtremumRecord], list[GlobalCheck], SignRule]:
    grid = result.grid
    n = result.params.n
    spline = grid.spline()
    records = []
    t2_extrema = locate_extrema(grid.x, grid.dy[2], grid.ddy[2])
    for root, kind in locate_extrema(grid.x, grid.dy[1], grid.ddy[1]):
        t1, t2 = np.exp(spline(root)[1:3])
        star = float(_model.t1_star(t2, n))
        records.append(
            ExtremumRecord(
                component="t1",
                kind=kind,
                x=root,
                value=float(t1),
                rule="t1 <= t1*" if kind == "max" else "t1 >= t1*",
                margin=star - t1 if kind == "max" else t1 - star,
            )
        )
    for root, kind in t2_extrema:
        t1, t2 = np.exp(spline(root)[1:3])
        if kind == "max":
            margin = 1 - t2
            rule = "t2 <= 1"
        else:
            margin = min(
                _model.u1_t2_minimum_cap(n) - t2,
                _model.u1_t1_cap_at_t2_minimum(t2, n) - t1,
            )
            rule = "t2 < 4/(n+1) and t1 <= (4t2-(n+1)t2^2)/(2t2+2)"
        records.append(
            ExtremumRecord(
                component="t2",
                kind=kind,
                x=root,
                value=float(t2),
                rule=rule,
                margin=float(margin),
            )
        )

    t1 = np.exp(grid.y[1])
    t2 = np.exp(grid.y[2])
    star = _model.t1_star(t2, n)
    monotone_t2 = not t2_extrema
    checks = [
        GlobalCheck(
            rule="t1* nondecreasing",
            margin=float(np.min(np.diff(star))),
            applicable=monotone_t2,
        ),
        GlobalCheck(
            rule="t1 >= min(t1(0), t1*(0))",
            margin=float(np.min(t1) - min(t1[0], star[0])),
            applicable=monotone_t2,
        ),
    ]

    K0 = float(np.exp(grid.y[0, 0]))
    e = (t1[0] * t2[0] ** 2 / K0) ** (1 / n)
    predicted = (
        -8 / (n - 2) * e * (n - 1 + 2 / t2[0] ** 2) * (t1[0] - star[0])
    )
    first = grid.dy[1, 1 : 1 + INITIAL_NODES]
    signs = set(np.sign(first[np.abs(first) > NOISE_FLOOR]).astype(int))
    rule = SignRule(
        t1_star_0=float(star[0]),
        predicted=float(predicted),
        observed=float(grid.ddy[1, 0]),
        initial_slope_sign=signs.pop() if len(signs) == 1 else 0,
    )
    return records, checks, rule


def classify_extrema(
    result: SolveResult, params: _model.ModelParams | None = None
) -> ExtremaReport:
    """Locate the interior extrema of a reduced-class solution.

    Parameters
    ----------
    result
        A converged solution of the Sp(1) or U(1) class.
    params
        Problem parameters; those of ``result`` by default.

    Raises
    ------
    InvalidClassError
        If the solution belongs to the full class.
    """
    params = params or result.params
    if params.symmetry is _model.SymmetryClass.FULL:
        raise errors.InvalidClassError(
            "Extrema classification needs a reduced symmetry class"
        )
    if params.symmetry is _model.SymmetryClass.SP1:
        records, checks = _sp1(result)
        rule = None
    else:
        records, checks, rule = _u1(result)
    for record in records:
        if not record.holds:
            logger.warning(
                "Extremum of %s at x=%.6g violates %s (margin %.3e)",
                record.component,
                record.x,
                record.rule,
                record.margin,
            )
    return ExtremaReport(
        symmetry=params.symmetry,
        records=tuple(records),
        global_checks=tuple(checks),
        sign_rule=rule,
    )
