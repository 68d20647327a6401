# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Expansion of the solution at the center ``x = 1``.

The series runs in ``u = 1 − x``. Smoothness at the center forces
``y_j(1) = y_j'(1) = 0``. Multiplying every solved-set equation by
``x(1−x²)²`` with ``1 − x² = u(2−u)``, the coefficient of ``u^p`` is
linear in ``d_{j,p}`` with indicial factor ``4p(p+1)`` for ``y₁`` and
``4(p−2)(p+n+1)`` for ``y_{i+1}``; the latter includes the linearized
bracket ``(n+1)(t_i − 1)`` of the forcing. The ``u²`` coefficients of
the anisotropy unknowns are therefore free, while ``y₁ = O(u⁴)``.
"""

from __future__ import annotations

import collections.abc as cabc
import dataclasses
import logging

import numpy as np
import numpy.typing as npt

from .. import errors
from .. import model as _model
from . import _powerseries as ps
from .origin import INDICIAL_TOL

__all__ = [
    "DEFAULT_CENTER_ORDER",
    "CenterExpansion",
    "center_coefficients",
    "center_residual_series",
    "expand_center",
]

logger = logging.getLogger(__name__)

DEFAULT_CENTER_ORDER = 6
"""Default truncation order in ``u``."""
MIN_CENTER_ORDER = 3
FREE_ORDER = 2
"""Order of the free anisotropy coefficients."""


@dataclasses.dataclass(frozen=True)
class CenterExpansion:
    """Truncated expansion of ``y`` in powers of ``u = 1 − x``."""

    order: int
    coeff: npt.NDArray[np.float64]
    """Coefficients ``d_{j,p}`` of ``u^p``, shape ``(m, N+1)``."""
    free: tuple[str, ...]
    n: int
    symmetry: _model.SymmetryClass
    values: tuple[float, ...]
    """The free ``u²`` coefficients."""

    @property
    def m(self) -> int:
        return self.coeff.shape[0]


def center_residual_series(
    coeff: npt.NDArray[np.float64],
    n: int,
    symmetry: _model.SymmetryClass,
) -> npt.NDArray[np.float64]:
    """Return the multiplied solved-set residuals as series in ``u``."""
    length = coeff.shape[1]
    y4 = [coeff[idx] for idx in symmetry.replication]
    d4 = [ps.deriv(c) for c in y4]
    dd4 = [ps.deriv(d) for d in d4]

    x = ps.polynomial([1.0, -1.0], length)
    a = ps.polynomial([0.0, 2.0, -1.0], length)
    x2 = ps.mul(x, x)
    x_a2 = ps.mul(x, ps.mul(a, a))
    c1 = ps.mul(a, ps.constant(1.0, length) + 3 * x2)
    ct = ps.mul(a, ps.constant(n - 1.0, length) + (n + 1) * x2)

    quadratic = n * ps.mul(d4[0], d4[0]) + ps.psi(d4, n)
    rows = [
        ps.mul(x_a2, dd4[0])
        + ps.mul(c1, d4[0])
        + ps.mul(x_a2, quadratic) / (2 * n * n)
    ]
    t3 = [ps.exp(y) for y in y4[1:]]
    e = ps.exp((y4[1] + y4[2] + y4[3] - y4[0]) / n)
    forcing = ps.forcing(t3, n)
    for i in range(1, 4):
        rows.append(
            ps.mul(x_a2, dd4[i])
            + ps.mul(ct, d4[i])
            + 0.5 * ps.mul(x_a2, ps.mul(d4[0], d4[i]))
            - 8 * ps.mul(x, ps.mul(e, forcing[i - 1]))
        )
    return np.stack([rows[r] for r in symmetry.solved_rows])


def _indicial(row: int, p: int, n: int) -> float:
    if row == 0:
        return 4 * p * (p + 1)
    return 4 * (p - 2) * (p + n + 1)


def center_coefficients(
    free: cabc.Sequence[float],
    order: int,
    n: int,
    symmetry: _model.SymmetryClass,
) -> npt.NDArray[np.float64]:
    """Run the recursion from the free ``u²`` coefficients."""
    m = symmetry.unknowns
    coeff = np.zeros((m, order + 1))
    for p in range(FREE_ORDER, order + 1):
        res = center_residual_series(coeff, n, symmetry)
        for row in range(m):
            if row > 0 and p == FREE_ORDER:
                coeff[row, p] = free[row - 1]
                continue
            ind = _indicial(row, p, n)
            if abs(ind) < INDICIAL_TOL:
                raise errors.DegenerateIndexError(p, row + 1)
            coeff[row, p] = -res[row, p] / ind + 0.0
    return coeff


def expand_center(
    free: cabc.Sequence[float],
    order: int | None,
    params: _model.ModelParams,
) -> CenterExpansion:
    """Build the expansion at ``x = 1``.

    Parameters
    ----------
    free
        The ``m−1`` coefficients of ``u²`` of the anisotropy unknowns.
    order
        Truncation order, at least 3. ``None`` selects 6.
    params
        Problem parameters.
    """
    n = params.n
    m = params.m
    if order is None:
        order = DEFAULT_CENTER_ORDER
    if order < MIN_CENTER_ORDER:
        raise errors.UnsupportedOrderError(
            f"Center expansion order must be at least 3, got {order}"
        )
    if len(free) != m - 1:
        raise errors.InvalidParameterError(
            f"Expected {m - 1} free center coefficients, got {len(free)}"
        )

    coeff = center_coefficients(free, order, n, params.symmetry)
    logger.debug("Center expansion of order %d: free=%r", order, free)
    return CenterExpansion(
        order=order,
        coeff=coeff,
        free=tuple(f"d_{j}_2" for j in range(2, m + 1)),
        n=n,
        symmetry=params.symmetry,
        values=tuple(float(v) for v in free),
    )
