# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Continuation in the boundary data from the round sphere.

The family ``t_i(0; s) = (1−s)·t_i(0) + s`` joins the round data at
``s = 1`` to the target at ``s = 0``. Every step is warm started from the
previous solution; a failed step is halved.
"""

from __future__ import annotations

import dataclasses
import logging

import numpy as np

from .. import errors
from .. import model as _model
from .grid import SolutionGrid
from .mesh import build_mesh
from .newton import SolveResult, newton_solve
from .options import ContinuationOptions, SolveOptions

__all__ = [
    "ContinuationPath",
    "ContinuationStep",
    "continuation_solve",
    "family_boundary_data",
]

logger = logging.getLogger(__name__)

RECOVERABLE = (
    errors.NonConvergenceError,
    errors.PositivityLossError,
    errors.SingularJacobianError,
)
"""Failures of a single step that trigger step halving."""


def family_boundary_data(
    target: _model.BoundaryData, s: float
) -> _model.BoundaryData:
    """Return the boundary data at family parameter ``s``."""
    return _model.BoundaryData(
        t0=tuple((1 - s) * v + s for v in target.t0)  # type: ignore[arg-type]
    )


@dataclasses.dataclass(frozen=True)
class ContinuationStep:
    """One accepted point of the path."""

    t: float
    """Family parameter; 1 is the round sphere, 0 the target."""
    boundary_data: _model.BoundaryData
    result: SolveResult

    @property
    def K0(self) -> float:
        return self.result.K0


@dataclasses.dataclass(frozen=True)
class ContinuationPath:
    """Accepted steps from the round data toward the target."""

    steps: tuple[ContinuationStep, ...]
    target_reached: bool

    @property
    def final(self) -> SolveResult:
        return self.steps[-1].result

    @property
    def k0_strictly_decreasing(self) -> bool:
        """Whether ``K(0)`` decreases strictly along the path."""
        k0 = [step.K0 for step in self.steps]
        return all(b < a for a, b in zip(k0, k0[1:]))


def _predict(
    steps: list[ContinuationStep], s_next: float, secant: bool
) -> tuple[SolutionGrid, np.ndarray, np.ndarray]:
    last = steps[-1].result
    if not secant or len(steps) < 2:
        return (
            last.grid,
            np.asarray(last.origin_params),
            np.asarray(last.center_params),
        )
    prev = steps[-2]
    weight = (s_next - steps[-1].t) / (steps[-1].t - prev.t)
    a, b = prev.result, last

    def extrapolate(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return v + weight * (v - u)

    grid = dataclasses.replace(
        b.grid,
        y=extrapolate(a.grid.y, b.grid.y),
        dy=extrapolate(a.grid.dy, b.grid.dy),
        ddy=extrapolate(a.grid.ddy, b.grid.ddy),
    )
    return (
        grid,
        extrapolate(np.asarray(a.origin_params), np.asarray(b.origin_params)),
        extrapolate(np.asarray(a.center_params), np.asarray(b.center_params)),
    )


def continuation_solve(
    target: _model.BoundaryData,
    steps: int,
    params: _model.ModelParams,
    options: SolveOptions | None = None,
    continuation: ContinuationOptions | None = None,
) -> ContinuationPath:
    """Follow the boundary-data family from the round sphere to ``target``.

    Parameters
    ----------
    target
        Target ratios in canonical order.
    steps
        Number of equal steps in the family parameter.
    params
        Problem parameters; the boundary data are replaced along the
        path.
    options
        Options of every Newton solve.
    continuation
        Halving limit and predictor.

    Returns
    -------
    path
        ``steps + 1`` accepted entries (more if steps were halved),
        the first being the round data.

    Raises
    ------
    StepCollapseError
        If a step could not be completed within ``max_halvings``
        halvings; it carries the last good parameter and the partial
        path.
    """
    options = options or SolveOptions()
    continuation = continuation or ContinuationOptions(steps=steps)
    if steps < 1:
        raise errors.InvalidParameterError(f"steps must be >= 1: {steps}")

    mesh = build_mesh(options.mesh_size, options.grading)
    round_params = params.with_boundary_data(family_boundary_data(target, 1))
    trivial = newton_solve(
        SolutionGrid.zeros(round_params, mesh), round_params, options
    )
    accepted = [
        ContinuationStep(
            t=1.0, boundary_data=round_params.boundary_data(), result=trivial
        )
    ]
    if target.is_round:
        return ContinuationPath(steps=tuple(accepted), target_reached=True)

    s = 1.0
    for j in range(1, steps + 1):
        s_target = 1 - j / steps if j < steps else 0.0
        ds = s - s_target
        halvings = 0
        while s > s_target:
            s_next = max(s - ds, s_target)
            bd = family_boundary_data(target, s_next)
            step_params = params.with_boundary_data(bd)
            guess, p_origin, p_center = _predict(
                accepted, s_next, continuation.secant_predictor
            )
            try:
                result = newton_solve(
                    guess,
                    step_params,
                    options,
                    origin_params=p_origin,
                    center_params=p_center,
                )
            except RECOVERABLE as err:
                halvings += 1
                if halvings > continuation.max_halvings:
                    logger.warning(
                        "Continuation step collapsed at t=%.6g: %s", s, err
                    )
                    raise errors.StepCollapseError(
                        s,
                        ContinuationPath(
                            steps=tuple(accepted), target_reached=False
                        ),
                    ) from err
                ds /= 2
                logger.debug(
                    "Step to t=%.6g failed (%s); halving to %.3g",
                    s_next,
                    err,
                    ds,
                )
                continue
            accepted.append(
                ContinuationStep(t=s_next, boundary_data=bd, result=result)
            )
            logger.info(
                "Continuation t=%.6g accepted: K0=%.12g after %d iterations",
                s_next,
                result.K0,
                result.iterations,
            )
            s = s_next
            halvings = 0

    return ContinuationPath(steps=tuple(accepted), target_reached=True)
