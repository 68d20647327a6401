# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Monotonicity, bounds and a priori estimates of converged solutions.

Every quantity is evaluated at the mesh nodes with the derivatives
stored on the grid, which come from the collocation polynomial inside
the collocation window and from the endpoint series in the caps.
Profiles are labelled in the original λ order.
"""

from __future__ import annotations

import itertools
import logging
import typing as t

import numpy as np
import numpy.typing as npt
import pydantic
from scipy import interpolate

from .. import model as _model
from .. import ode_system
from ..bvp_solver import SolveResult
from .variation import NOISE_FLOOR

__all__ = [
    "APRIORI_INTERVAL",
    "AprioriReport",
    "BoundsReport",
    "MonotonicityReport",
    "RatioSigns",
    "check_apriori",
    "check_bounds",
    "check_monotonicity",
    "count_sign_changes",
]

logger = logging.getLogger(__name__)

Array: t.TypeAlias = npt.NDArray[np.float64]

APRIORI_INTERVAL = (0.0, 0.75)
"""Interval of the near-boundary derivative estimates."""
INTEGRAL_WINDOW_START = 0.5
"""Left end of the window of the ``y₁'`` integral identity."""
RATIO_RANGE = (0.5, 2.0)
"""Open range of pairwise ratios for which monotonicity is expected."""
BOUND_SLACK = 1e-9


def _boundary_data(result: SolveResult) -> _model.BoundaryData:
    return result.params.boundary_data()


def count_sign_changes(
    values: npt.ArrayLike, floor: float = NOISE_FLOOR
) -> tuple[int, int]:
    """Return the sign changes of a sampled function and its last sign.

    Samples with magnitude at most ``floor`` are dropped. The sign is 0
    if no sample survives.
    """
    v = np.asarray(values, dtype=np.float64)
    signs = np.sign(v[np.abs(v) > floor])
    if signs.size == 0:
        return 0, 0
    return int(np.count_nonzero(signs[1:] != signs[:-1])), int(signs[-1])


class RatioSigns(pydantic.BaseModel):
    """Sign pattern of one derivative difference ``y_i' − y_j'``."""

    model_config = pydantic.ConfigDict(frozen=True)

    pair: tuple[int, int]
    """Indices ``(i, j)`` of the log-variables, 2-based as in ``y₂..y₄``."""
    sign: int
    """Sign of the difference at the last interior node that is above
    the noise floor; 0 if the difference vanishes identically."""
    sign_changes: int
    excluded: bool
    """The difference is identically zero within the noise floor."""


class MonotonicityReport(pydantic.BaseModel):
    """Monotonicity of ``K`` and of the ratios ``t_i/t_j``."""

    model_config = pydantic.ConfigDict(frozen=True)

    y1_positive: bool
    """``y₁' > 0`` at every interior node."""
    y1prime_min: float
    """Minimum of ``y₁'`` over the interior nodes."""
    ratio_signs: tuple[RatioSigns, ...]
    condition_3_1_held: bool
    """All three triangle conditions on the boundary data hold."""
    in_regime: bool
    """The data are pairwise distinct, satisfy the triangle conditions
    and have all pairwise ratios within ``(1/2, 2)``."""

    @property
    def ratios_monotone(self) -> bool:
        """No counted difference changes sign."""
        return all(
            r.sign_changes == 0 for r in self.ratio_signs if not r.excluded
        )


def _in_regime(bd: _model.BoundaryData) -> bool:
    t0 = bd.t0
    low, high = RATIO_RANGE
    distinct = len({*t0}) == 3
    ratios = [a / b for a, b in itertools.permutations((*t0, 1.0), 2)]
    return (
        distinct
        and all(_model.check_conditions(bd).cond_3_1)
        and all(low < r < high for r in ratios)
    )


def check_monotonicity(
    result: SolveResult, bd: _model.BoundaryData | None = None
) -> MonotonicityReport:
    """Check the monotonicity of ``K`` and of the anisotropy ratios.

    Reduced classes are replicated to four unknowns; differences of
    repeated unknowns vanish identically and are excluded from the
    sign-change count.

    Parameters
    ----------
    result
        A converged solution.
    bd
        Boundary data used for the triangle conditions; the data of
        ``result`` by default.
    """
    grid = result.grid
    bd = bd or _boundary_data(result)
    _, dy, _ = grid.labelled()
    interior = (grid.x > 0) & (grid.x < 1)
    d1 = dy[0, interior]
    signs = []
    for i, j in itertools.combinations(range(1, 4), 2):
        diff = dy[i, interior] - dy[j, interior]
        changes, last = count_sign_changes(diff)
        excluded = not np.any(np.abs(diff) > NOISE_FLOOR)
        signs.append(
            RatioSigns(
                pair=(i + 1, j + 1),
                sign=last,
                sign_changes=changes,
                excluded=excluded,
            )
        )
    y1_min = float(np.min(d1))
    return MonotonicityReport(
        y1_positive=y1_min > 0,
        y1prime_min=y1_min,
        ratio_signs=tuple(signs),
        condition_3_1_held=all(_model.check_conditions(bd).cond_3_1),
        in_regime=_in_regime(bd),
    )


class BoundsReport(pydantic.BaseModel):
    """Pointwise bounds of a converged solution."""

    model_config = pydantic.ConfigDict(frozen=True)

    t_min: tuple[float, float, float]
    t_max: tuple[float, float, float]
    delta: float
    """Observed floor ``min_{i,x} t_i(x)``."""
    bound_3_6: float
    """Upper bound of every ``t_i`` from the sorted boundary data."""
    t_upper_margin: float
    """``bound_3_6 − max_{i,x} t_i(x)``."""
    K_monotone: bool
    """``y₁' >= −1e-11`` at every node."""
    K_range: tuple[float, float]
    """``(K(0), max K)``."""
    K_le_one: bool
    """``K <= 1 + 1e-11`` at every node."""
    y1prime_cap_margin: float
    """``min (4nx/(1−x²) − y₁')`` over the interior nodes."""
    K0_lower_bound: float
    K0_above_bound: bool
    tau: float
    """Quotient margin used for the ``K(0)`` bound."""
    upsilon_margin: float
    """``min (Υ − (1−x²)²Ψ/(16n²))`` over the interior nodes."""
    trace_margin: float
    """``min (n + 5 − t₁ − t₂ − t₃)``."""
    quotient_margin: float
    """``min (H(t) − τ·min_i t_i²)`` with ``H`` the quotient form."""
    I4_cap: float
    """``δ^{−3/n}``."""
    I4_within_cap: bool
    sp1_lower_bound_held: bool | None = None
    """For the Sp(1) class: ``t₁ > (6/(n(n−1)))^{n/(n−3)}`` everywhere."""
    in_regime: bool

    @property
    def hard_bounds_hold(self) -> bool:
        """The bounds that must hold for every in-regime solution."""
        return (
            self.t_upper_margin >= -BOUND_SLACK
            and self.K_monotone
            and self.K_le_one
            and self.y1prime_cap_margin >= -BOUND_SLACK
        )


def check_bounds(
    result: SolveResult,
    bd: _model.BoundaryData | None = None,
    params: _model.ModelParams | None = None,
) -> BoundsReport:
    """Evaluate the upper and lower bounds of a converged solution.

    Parameters
    ----------
    result
        A converged solution.
    bd
        Boundary data of the bounds; the data of ``result`` by default.
    params
        Problem parameters; those of ``result`` by default.
    """
    params = params or result.params
    bd = bd or params.boundary_data()
    n = params.n
    grid = result.grid
    x = grid.x
    y, dy, _ = grid.labelled()
    K = np.exp(y[0])
    t3 = np.exp(y[1:])
    metric_i4 = np.exp((y[0] - np.sum(y[1:], axis=0)) / n)

    s1, _, s3 = bd.sorted_descending()
    bound = _model.t_upper_bound(s1, s3, n)
    conditions = _model.check_conditions(bd)
    tau = conditions.tau_margin
    k0_bound = _model.k0_lower_bound(bd, n, tau)

    interior = (x > 0) & (x < 1)
    xi = x[interior]
    cap = 4 * n * xi / (1 - xi * xi)
    fields = ode_system.derived_fields(
        grid.y[:, interior], n, params.symmetry, grid.dy[:, interior]
    )
    assert fields.psi is not None
    a = 1 - xi * xi
    ups_margin = fields.upsilon - a * a * fields.psi / (16 * n * n)

    delta = float(np.min(t3))
    t_floor = np.min(t3, axis=0)
    quotient = _model.quotient_form(t3[0], t3[1], t3[2]) - tau * t_floor**2
    i4_cap = delta ** (-3 / n)
    sp1_held = None
    if params.symmetry is _model.SymmetryClass.SP1:
        sp1_held = bool(np.all(t3[0] > _model.sp1_t1_lower_bound(n)))

    report = BoundsReport(
        t_min=tuple(map(float, np.min(t3, axis=1))),  # type: ignore[arg-type]
        t_max=tuple(map(float, np.max(t3, axis=1))),  # type: ignore[arg-type]
        delta=delta,
        bound_3_6=bound,
        t_upper_margin=float(bound - np.max(t3)),
        K_monotone=bool(np.all(dy[0] >= -NOISE_FLOOR)),
        K_range=(float(K[0]), float(np.max(K))),
        K_le_one=bool(np.all(K <= 1 + NOISE_FLOOR)),
        y1prime_cap_margin=float(np.min(cap - dy[0, interior])),
        K0_lower_bound=k0_bound,
        K0_above_bound=result.K0 >= k0_bound,
        tau=tau,
        upsilon_margin=float(np.min(ups_margin)),
        trace_margin=float(np.min(n + 5 - np.sum(t3, axis=0))),
        quotient_margin=float(np.min(quotient)),
        I4_cap=float(i4_cap),
        I4_within_cap=bool(np.all(metric_i4 <= i4_cap * (1 + BOUND_SLACK))),
        sp1_lower_bound_held=sp1_held,
        in_regime=_in_regime(bd),
    )
    logger.debug(
        "Bounds: t in [%.6g, %.6g] cap %.6g, K0=%.12g >= %.12g",
        report.delta,
        max(report.t_max),
        report.bound_3_6,
        result.K0,
        report.K0_lower_bound,
    )
    return report


class AprioriReport(pydantic.BaseModel):
    """Fitted constants of the near-boundary derivative estimates."""

    model_config = pydantic.ConfigDict(frozen=True)

    interval: tuple[float, float]
    constants: tuple[float, float, float, float]
    """Smallest ``C`` with ``|y_i'| <= Cx`` and ``|y_i''| <= C`` on the
    interval, per log-variable in the original λ order."""
    slope_ratio: tuple[float, float, float, float]
    """``max |y_i'|/x`` over the interior nodes of the interval."""
    y1_integral_defect: float
    """Largest mismatch between ``y₁'`` and its integral representation,
    relative to ``max |y₁'|`` on the window."""
    integral_window: tuple[float, float]


def _y1_integral_defect(
    result: SolveResult, window: tuple[float, float]
) -> float:
    """Compare ``y₁'`` with the integral of the ``y₁`` equation.

    ``y₁'(x) = (2n²)⁻¹ K^{−1/(2n)} x (1−x²)⁻² ∫_x^1 s⁻¹(1−s²)² K^{1/(2n)} Ψ ds``.
    """
    grid = result.grid
    n = result.params.n
    x = grid.x
    keep = x >= window[0]
    xs = x[keep]
    fields = ode_system.derived_fields(
        grid.y[:, keep], n, result.params.symmetry, grid.dy[:, keep]
    )
    assert fields.psi is not None
    weight = fields.K ** (1 / (2 * n))
    a = 1 - xs * xs
    integrand = a * a * weight * fields.psi / xs
    antiderivative = (
        interpolate.CubicSpline(xs, integrand).antiderivative()
    )
    tail = antiderivative(xs[-1]) - antiderivative(xs)

    inside = (xs <= window[1]) & (xs < 1)
    xw = xs[inside]
    aw = 1 - xw * xw
    predicted = xw * tail[inside] / (2 * n * n * weight[inside] * aw * aw)
    observed = grid.dy[0, keep][inside]
    scale = float(np.max(np.abs(observed)))
    if scale == 0.0:
        return float(np.max(np.abs(predicted)))
    return float(np.max(np.abs(predicted - observed)) / scale)


def check_apriori(
    result: SolveResult,
    interval: tuple[float, float] = APRIORI_INTERVAL,
) -> AprioriReport:
    """Fit the constants of ``|y_i'| <= Cx`` and ``|y_i''| <= C``.

    The slope bound is evaluated at the nodes with ``x > 0``; the second
    derivative bound includes ``x = 0``, where the grid holds the series
    value.
    """
    grid = result.grid
    _, dy, ddy = grid.labelled()
    x = grid.x
    inside = (x >= interval[0]) & (x <= interval[1])
    positive = inside & (x > 0)
    slope = np.max(np.abs(dy[:, positive]) / x[positive], axis=1)
    curvature = np.max(np.abs(ddy[:, inside]), axis=1)
    constants = np.maximum(slope, curvature)
    window = (INTEGRAL_WINDOW_START, 1 - result.options.series_trust)
    return AprioriReport(
        interval=interval,
        constants=tuple(map(float, constants)),  # type: ignore[arg-type]
        slope_ratio=tuple(map(float, slope)),  # type: ignore[arg-type]
        y1_integral_defect=_y1_integral_defect(result, window),
        integral_window=window,
    )
