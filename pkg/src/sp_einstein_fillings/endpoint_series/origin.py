# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Expansion of the solution at conformal infinity ``x = 0``.

Substituting ``y_j = Σ_p c_{j,p} x^p`` into the solved set multiplied by
``x(1−x²)`` (the ``y₁`` equation) and ``x(1−x²)²`` (the ``t_i``
equations), the coefficient of ``x^{p−1}`` is linear in ``c_{j,p}`` with
indicial factor ``p(p−2)`` for ``y₁`` and ``p(p−n)`` for ``y_{i+1}``.
The zeros of those factors are where free data enters: the curvature
``c_{1,2}`` and the order-``n`` nonlocal coefficients.
"""

from __future__ import annotations

import collections.abc as cabc
import dataclasses
import logging

import numpy as np
import numpy.typing as npt

from .. import errors
from .. import model as _model
from .. import ode_system
from . import _powerseries as ps

__all__ = [
    "INDICIAL_TOL",
    "OriginExpansion",
    "default_origin_order",
    "expand_origin",
    "fg_curvature",
    "origin_coefficients",
    "origin_residual_series",
]

logger = logging.getLogger(__name__)

INDICIAL_TOL = 1e-12
"""Indicial factors with smaller magnitude count as vanishing."""
CURVATURE_ORDER = 2
"""Order of the free ``y₁`` coefficient."""
RESONANCE_TOL = 1e-8
"""Residual at a resonant order above which an obstruction is logged."""


@dataclasses.dataclass(frozen=True)
class OriginExpansion:
    """Truncated expansion of ``y`` in powers of ``x``."""

    order: int
    """Truncation order ``N``."""
    coeff: npt.NDArray[np.float64]
    """Coefficients ``c_{j,p}``, shape ``(m, N+1)``."""
    free: tuple[str, ...]
    """Identifiers of the coefficients not fixed by the recursion."""
    n: int
    symmetry: _model.SymmetryClass
    K0: float
    curvature: float
    nonlocal_: tuple[float, ...]

    @property
    def m(self) -> int:
        return self.coeff.shape[0]


def default_origin_order(n: int) -> int:
    return n + 1


def fg_curvature(bd: _model.BoundaryData, K0: float, n: int) -> float:
    """Return the ``x²`` coefficient of ``y₁`` fixed by the constraint.

    Near ``x = 0`` the first-order constraint reduces to
    ``−8n c_{1,2} + 16n Υ(0)/(n−1) = 0``.
    """
    y = np.log([K0, *bd.t0])
    fields = ode_system.derived_fields(y, n, _model.SymmetryClass.FULL)
    return float(2 * fields.upsilon / (n - 1))


def origin_residual_series(
    coeff: npt.NDArray[np.float64],
    n: int,
    symmetry: _model.SymmetryClass,
) -> npt.NDArray[np.float64]:
    """Return the multiplied solved-set residuals as series in ``x``.

    Row ``j`` has the coefficient of ``x^q`` at index ``q``.
    """
    length = coeff.shape[1]
    y4 = [coeff[idx] for idx in symmetry.replication]
    d4 = [ps.deriv(c) for c in y4]
    dd4 = [ps.deriv(d) for d in d4]

    x = ps.polynomial([0.0, 1.0], length)
    one_minus = ps.polynomial([1.0, 0.0, -1.0], length)
    x_a = ps.mul(x, one_minus)
    x_a2 = ps.mul(x_a, one_minus)
    c1 = ps.polynomial([1.0, 0.0, 3.0], length)
    ct = ps.mul(one_minus, ps.polynomial([n - 1.0, 0.0, n + 1.0], length))

    quadratic = n * ps.mul(d4[0], d4[0]) + ps.psi(d4, n)
    rows = [
        ps.mul(x_a, dd4[0])
        - ps.mul(c1, d4[0])
        + ps.mul(x_a, quadratic) / (2 * n * n)
    ]
    t3 = [ps.exp(y) for y in y4[1:]]
    e = ps.exp((y4[1] + y4[2] + y4[3] - y4[0]) / n)
    forcing = ps.forcing(t3, n)
    for i in range(1, 4):
        rows.append(
            ps.mul(x_a2, dd4[i])
            - ps.mul(ct, d4[i])
            + 0.5 * ps.mul(x_a2, ps.mul(d4[0], d4[i]))
            - 8 * ps.mul(x, ps.mul(e, forcing[i - 1]))
        )
    return np.stack([rows[r] for r in symmetry.solved_rows])


def _indicial(row: int, p: int, n: int) -> float:
    if row == 0:
        return p * (p - 2)
    return p * (p - n)


def origin_coefficients(
    initial: npt.ArrayLike,
    curvature: float,
    nonlocal_: cabc.Sequence[float],
    order: int,
    n: int,
    symmetry: _model.SymmetryClass,
) -> npt.NDArray[np.float64]:
    """Run the recursion from the values ``y_j(0)`` and the free data.

    No range checks are made, so the solver can probe ``K0 > 1``.
    """
    m = symmetry.unknowns
    coeff = np.zeros((m, order + 1))
    coeff[:, 0] = initial
    for p in range(1, order + 1):
        res = origin_residual_series(coeff, n, symmetry)
        for row in range(m):
            if row == 0 and p == CURVATURE_ORDER:
                coeff[row, p] = curvature
                continue
            if row > 0 and p == n:
                if abs(res[row, p - 1]) > RESONANCE_TOL:
                    logger.debug(
                        "Resonance obstruction %.3e at order %d, row %d",
                        res[row, p - 1],
                        p,
                        row,
                    )
                coeff[row, p] = nonlocal_[row - 1]
                continue
            ind = _indicial(row, p, n)
            if abs(ind) < INDICIAL_TOL:
                raise errors.DegenerateIndexError(p, row + 1)
            coeff[row, p] = -res[row, p - 1] / ind + 0.0
    return coeff


def expand_origin(
    bd: _model.BoundaryData,
    K0: float,
    nonlocal_: cabc.Sequence[float],
    order: int | None,
    params: _model.ModelParams,
    *,
    curvature: float | None = None,
) -> OriginExpansion:
    """Build the expansion at ``x = 0``.

    Parameters
    ----------
    bd
        Boundary ratios in canonical order.
    K0
        ``K(0)``, in ``(0, 1]``.
    nonlocal_
        The ``m−1`` order-``n`` coefficients of the anisotropy unknowns.
    order
        Truncation order, at most ``n+2``. ``None`` selects ``n+1``.
    params
        Problem parameters.
    curvature
        The ``x²`` coefficient of ``y₁``. When omitted it is fixed by
        the first-order constraint.

    Raises
    ------
    UnsupportedOrderError
        If ``order`` is outside ``[2, n+2]``.
    DegenerateIndexError
        If an indicial factor vanishes at a non-resonant order.
    """
    n = params.n
    m = params.m
    if order is None:
        order = default_origin_order(n)
    if not CURVATURE_ORDER <= order <= n + 2:
        raise errors.UnsupportedOrderError(
            f"Origin expansion order must lie in [2, {n + 2}], got {order}"
        )
    if not 0 < K0 <= 1:
        raise errors.InvalidParameterError(f"K0 must lie in (0, 1]: {K0}")
    if len(nonlocal_) != m - 1:
        raise errors.InvalidParameterError(
            f"Expected {m - 1} nonlocal coefficients, got {len(nonlocal_)}"
        )
    if curvature is None:
        curvature = fg_curvature(bd, K0, n)

    initial = np.log([K0, *bd.t0[: m - 1]])
    coeff = origin_coefficients(
        initial, curvature, nonlocal_, order, n, params.symmetry
    )
    logger.debug(
        "Origin expansion of order %d: K0=%r curvature=%r",
        order,
        K0,
        curvature,
    )
    free = ("log_K0", "c_1_2") + tuple(
        f"c_{j}_{n}" for j in range(2, m + 1)
    )
    return OriginExpansion(
        order=order,
        coeff=coeff,
        free=free,
        n=n,
        symmetry=params.symmetry,
        K0=float(K0),
        curvature=float(curvature),
        nonlocal_=tuple(float(v) for v in nonlocal_),
    )
