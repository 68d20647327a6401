# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Truncated power-series solutions at the two singular endpoints.

The expansion at ``x = 0`` is built in
[origin][sp_einstein_fillings.endpoint_series.origin], the one at
``x = 1`` in [center][sp_einstein_fillings.endpoint_series.center].
This module evaluates either kind and measures the parity of a computed
solution near conformal infinity.
"""

from __future__ import annotations

import collections.abc as cabc
import logging
import typing as t

import numpy as np
import numpy.typing as npt
from numpy.polynomial import polynomial as P

from .. import errors, ode_system
from .center import (
    DEFAULT_CENTER_ORDER,
    CenterExpansion,
    center_coefficients,
    center_residual_series,
    expand_center,
)
from .origin import (
    OriginExpansion,
    default_origin_order,
    expand_origin,
    fg_curvature,
    origin_coefficients,
    origin_residual_series,
)

if t.TYPE_CHECKING:
    from ..bvp_solver.grid import SolutionGrid

__all__ = [
    "DEFAULT_CENTER_ORDER",
    "DEFAULT_TRUST",
    "PARITY_RADIUS",
    "CenterExpansion",
    "Expansion",
    "OriginExpansion",
    "center_coefficients",
    "center_residual_series",
    "default_origin_order",
    "evaluate_series",
    "expand_center",
    "expand_origin",
    "fg_curvature",
    "origin_coefficients",
    "origin_residual_series",
    "parity_defect",
    "series_state",
]

logger = logging.getLogger(__name__)

Expansion = OriginExpansion | CenterExpansion

DEFAULT_TRUST = 0.1
"""Default trust radius of an expansion, measured from its endpoint."""
PARITY_RADIUS = 0.05
"""Width of the window near ``x = 0`` used to fit the parity defect."""
PARITY_EXTRA_DEGREE = 3
"""Degree of the parity fit above ``n``."""
PARITY_FLOOR = 1e-12
"""Lower bound of the even-coefficient scale in the parity defect."""


def evaluate_series(
    e: Expansion,
    x: npt.ArrayLike,
    trust: float = DEFAULT_TRUST,
) -> ode_system.StateSample:
    """Evaluate an expansion and its first two derivatives.

    Parameters
    ----------
    e
        Expansion at either endpoint.
    x
        Abscissae in the original coordinate.
    trust
        Maximal distance from the endpoint of ``e``.

    Raises
    ------
    DomainError
        If a point lies outside the trust radius.
    """
    xa = np.asarray(x, dtype=np.float64)
    local = xa if isinstance(e, OriginExpansion) else 1 - xa
    if np.any(local < 0) or np.any(local > trust):
        raise errors.DomainError(
            f"Series evaluation outside the trust radius {trust}"
        )
    y, dy, ddy = series_state(
        e.coeff, local, at_center=isinstance(e, CenterExpansion)
    )
    return ode_system.StateSample(x=xa, y=y, dy=dy, ddy=ddy)


def series_state(
    coeff: npt.NDArray[np.float64],
    local: npt.ArrayLike,
    *,
    at_center: bool,
) -> tuple[
    npt.NDArray[np.float64], npt.NDArray[np.float64], npt.NDArray[np.float64]
]:
    """Return ``y, y', y''`` (derivatives in ``x``) of raw coefficients.

    ``local`` is ``x`` for an origin expansion and ``1 − x`` for a
    center expansion.
    """
    c = coeff.T
    y = P.polyval(local, c)
    dy = P.polyval(local, P.polyder(c, axis=0))
    ddy = P.polyval(local, P.polyder(c, 2, axis=0))
    if at_center:
        dy = -dy
    return y, dy, ddy


def parity_defect(
    sol: SolutionGrid,
    orders: cabc.Sequence[int] | None = None,
    *,
    rho: float = PARITY_RADIUS,
) -> npt.NDArray[np.float64]:
    """Measure odd-order content of a solution near ``x = 0``.

    A polynomial of degree ``n+3`` in ``s = x/ρ`` is fitted in the least
    squares sense to the values and first derivatives at the nodes with
    ``x <= ρ``. The degree covers the nonlocal odd terms ``x^n`` and
    ``x^{n+2}`` and the even terms through ``x^{n+3}``; on the default
    window the omitted terms are below ``ρ^{n+4}``. The defect of order
    ``p`` is the largest ``|ĉ_p|`` over all unknowns, divided by the
    largest even coefficient.

    The window has to reach past the series cap of the solver; inside
    the cap the grid holds the even expansion itself.

    Parameters
    ----------
    sol
        Converged solution grid.
    orders
        Odd orders to report. Defaults to the odd orders below ``n``.
    rho
        Width of the fitting window.

    Raises
    ------
    InsufficientResolutionError
        If the window holds too few nodes for the fit.
    """
    n = sol.params.n
    degree = n + PARITY_EXTRA_DEGREE
    if orders is None:
        orders = list(range(1, n, 2))
    mask = sol.x <= rho
    count = int(np.count_nonzero(mask))
    if 2 * count < degree + 1 + 4:
        raise errors.InsufficientResolutionError(
            f"Only {count} nodes within {rho} of x=0; the parity fit of"
            f" degree {degree} needs at least {(degree + 5 + 1) // 2}"
        )
    s = sol.x[mask] / rho
    powers = np.arange(degree + 1)
    values = P.polyvander(s, degree)
    slopes = np.zeros_like(values)
    slopes[:, 1:] = values[:, :-1] * powers[1:]
    design = np.vstack([values, slopes])

    defects = np.zeros(len(orders))
    for j in range(sol.y.shape[0]):
        rhs = np.concatenate([sol.y[j, mask], rho * sol.dy[j, mask]])
        coef, *_ = np.linalg.lstsq(design, rhs, rcond=None)
        scale = max(float(np.max(np.abs(coef[::2]))), PARITY_FLOOR)
        for idx, p in enumerate(orders):
            defects[idx] = max(defects[idx], abs(coef[p]) / scale)
    return defects
