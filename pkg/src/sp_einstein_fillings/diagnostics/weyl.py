# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Weyl-component estimators and the decay estimates near the center.

Two families of mixed radial Weyl components are evaluated in closed
form from the profiles:

- for ``{i, p, q} = {1, 2, 3}``:
  ``2x²/(1−x²) I_q^{−1/2} |d/dx [√(t_i/t_p) + √(t_p/t_i) − t_q/√(t_i t_p)]|``
- for ``q = 1, 2, 3``:
  ``2x²/(1−x²) I₄^{−1/2} t_q^{1/2} |y_{q+1}'|``

Their supremum ``eps_obs`` is a lower bound of the full Weyl norm, not
the norm itself.
"""

from __future__ import annotations

import logging
import typing as t

import numpy as np
import numpy.typing as npt
import pydantic

from .. import model as _model
from ..bvp_solver import ContinuationPath, SolveResult

__all__ = [
    "DECAY_START",
    "WeylReport",
    "component_estimators",
    "weyl_along_path",
    "weyl_estimates",
]

logger = logging.getLogger(__name__)

Array: t.TypeAlias = npt.NDArray[np.float64]

DECAY_START = 0.5
"""Default left end ``δ₀`` of the decay fit."""


class WeylReport(pydantic.BaseModel):
    """Observed Weyl proxy and fitted decay constants."""

    model_config = pydantic.ConfigDict(frozen=True)

    eps_obs: float
    """Supremum of both estimator families over the interior nodes."""
    eps_mixed: float
    eps_radial: float
    x_max: float
    """Node where the supremum is attained."""
    decay_start: float
    decay_consts: tuple[float, float, float, float]
    """Per log-variable: ``C`` in ``|y₁^{(k)}| <= C ε² (1−x²)^{4−k}``
    and ``|y_i^{(k)}| <= C ε (1−x²)^{2−k}``, ``k = 1, 2``, on
    ``[δ₀, 1)``. Zero when ``ε = 0``."""
    weyl_cap: float
    exceeds_cap: bool


def component_estimators(
    x: Array, y: Array, dy: Array, n: int
) -> tuple[Array, Array]:
    """Return the mixed and the radial estimator families.

    ``y`` and ``dy`` hold the four labelled log-variables at interior
    nodes ``x``. The results have shapes ``(3, N)``, one row per ``q``.
    """
    log_i4 = (y[0] - np.sum(y[1:], axis=0)) / n
    factor = 2 * x * x / (1 - x * x)
    t3 = np.exp(y[1:])
    radial = factor * np.exp(-log_i4 / 2) * np.sqrt(t3) * np.abs(dy[1:])

    mixed = np.zeros_like(radial)
    for q in range(3):
        i, p = (idx for idx in range(3) if idx != q)
        a, b, c = y[1 + i], y[1 + p], y[1 + q]
        da, db, dc = dy[1 + i], dy[1 + p], dy[1 + q]
        half = (a - b) / 2
        derivative = (
            (da - db) / 2 * (np.exp(half) - np.exp(-half))
            - (dc - (da + db) / 2) * np.exp(c - (a + b) / 2)
        )
        log_iq = c + log_i4
        mixed[q] = factor * np.exp(-log_iq / 2) * np.abs(derivative)
    return mixed, radial


def _decay_constant(
    values: Array, weight: Array, eps_power: float
) -> float:
    if eps_power == 0.0:
        return 0.0
    return float(np.max(np.abs(values) / (eps_power * weight)))


def weyl_estimates(
    result: SolveResult, decay_start: float = DECAY_START
) -> WeylReport:
    """Evaluate the Weyl estimators and fit the decay constants.

    Parameters
    ----------
    result
        A converged solution.
    decay_start
        Left end ``δ₀`` of the decay fit.
    """
    grid = result.grid
    n = result.params.n
    y, dy, ddy = grid.labelled()
    x = grid.x
    interior = (x > 0) & (x < 1)
    mixed, radial = component_estimators(
        x[interior], y[:, interior], dy[:, interior], n
    )
    combined = np.maximum(np.max(mixed, axis=0), np.max(radial, axis=0))
    arg = int(np.argmax(combined))
    eps = float(combined[arg])

    window = interior & (x >= decay_start)
    a = 1 - x[window] ** 2
    consts = [
        max(
            _decay_constant(dy[0, window], a**3, eps * eps),
            _decay_constant(ddy[0, window], a**2, eps * eps),
        )
    ]
    for j in range(1, 4):
        consts.append(
            max(
                _decay_constant(dy[j, window], a, eps),
                _decay_constant(ddy[j, window], np.ones_like(a), eps),
            )
        )
    cap = _model.weyl_cap(n)
    if eps > cap:
        logger.warning(
            "Observed Weyl proxy %.6g exceeds the cap %.6g", eps, cap
        )
    return WeylReport(
        eps_obs=eps,
        eps_mixed=float(np.max(mixed)),
        eps_radial=float(np.max(radial)),
        x_max=float(x[interior][arg]),
        decay_start=decay_start,
        decay_consts=tuple(consts),  # type: ignore[arg-type]
        weyl_cap=cap,
        exceeds_cap=eps > cap,
    )


def weyl_along_path(
    path: ContinuationPath, decay_start: float = DECAY_START
) -> tuple[WeylReport, ...]:
    """Evaluate [weyl_estimates][sp_einstein_fillings.diagnostics.weyl.weyl_estimates]
    at every accepted step."""
    return tuple(
        weyl_estimates(step.result, decay_start) for step in path.steps
    )
