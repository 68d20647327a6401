# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Damped Newton iteration on the collocation system."""

from __future__ import annotations

import dataclasses
import logging

import numpy as np
import numpy.typing as npt

from .. import errors
from .. import model as _model
from .collocation import CollocationProblem
from .grid import SolutionGrid
from .mesh import build_mesh
from .options import SolveOptions

__all__ = ["SolveResult", "newton_solve"]

logger = logging.getLogger(__name__)

_Iterate = tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]


@dataclasses.dataclass(frozen=True)
class SolveResult:
    """Converged solution with its residual bookkeeping."""

    grid: SolutionGrid
    K0: float
    """``K(0)``."""
    residual_solved: float
    """Sup-norm of the discrete system at the returned iterate."""
    residual_extra: tuple[float, float]
    """Sup-norms of the two extra equations over the collocated nodes."""
    iterations: int
    history: tuple[float, ...]
    """Residual sup-norm before every Newton iteration and at the end."""
    origin_params: tuple[float, ...]
    """``log K0``, the ``y₁`` curvature and the nonlocal coefficients."""
    center_params: tuple[float, ...]
    """The free ``u²`` coefficients at the center."""
    options: SolveOptions
    window: tuple[int, int] = (0, 0)
    """Mesh indices of the outermost collocated nodes."""

    @property
    def params(self) -> _model.ModelParams:
        return self.grid.params


def _line_search(
    problem: CollocationProblem,
    X: npt.NDArray[np.float64],
    F_norm: float,
    step: npt.NDArray[np.float64],
    options: SolveOptions,
) -> _Iterate:
    """Backtrack on the residual sup-norm with the Armijo condition."""
    alpha = 1.0
    last: _Iterate | None = None
    failure: errors.PositivityLossError | None = None
    for _ in range(options.max_backtracks + 1):
        trial = X + alpha * step
        try:
            F_trial = problem.residual(trial)
        except errors.PositivityLossError as err:
            failure = err
        else:
            last = (trial, F_trial)
            norm = float(np.max(np.abs(F_trial)))
            if norm <= (1 - options.armijo_sigma * alpha) * F_norm:
                return last
        alpha /= 2
        logger.debug("Backtracking to alpha=%.3g", alpha)
    if last is None:
        assert failure is not None
        raise failure
    return last


def newton_solve(
    guess: SolutionGrid,
    params: _model.ModelParams,
    options: SolveOptions | None = None,
    *,
    origin_params: npt.ArrayLike | None = None,
    center_params: npt.ArrayLike | None = None,
) -> SolveResult:
    """Solve the boundary value problem from an initial guess.

    Parameters
    ----------
    guess
        Initial profiles; resampled if not on the solver mesh.
    params
        Problem parameters.
    options
        Solver options.
    origin_params, center_params
        Series data of a previous solve, used as warm start.

    Raises
    ------
    NonConvergenceError
        If ``max_iter`` iterations do not reach ``tol``.
    SingularJacobianError
        If the Newton matrix has a zero pivot.
    PositivityLossError
        If every trial point of a line search leaves the positive
        range.
    """
    options = options or SolveOptions()
    mesh = build_mesh(options.mesh_size, options.grading)
    problem = CollocationProblem(params, mesh, options)
    X = problem.initial_vector(
        guess.with_params(params),
        None if origin_params is None else np.asarray(origin_params),
        None if center_params is None else np.asarray(center_params),
    )
    F = problem.residual(X)
    history: list[float] = []
    iterations = 0
    while True:
        norm = float(np.max(np.abs(F)))
        history.append(norm)
        logger.debug("Newton iteration %d: residual %.3e", iterations, norm)
        if norm <= options.tol:
            break
        if iterations >= options.max_iter:
            raise errors.NonConvergenceError(
                f"Newton did not reach {options.tol:g} in"
                f" {options.max_iter} iterations (residual {norm:.3e})",
                history,
            )
        step = problem.newton_step(problem.jacobian(X), F)
        X, F = _line_search(problem, X, norm, step, options)
        iterations += 1

    grid = problem.to_grid(X)
    p_origin, _, p_center = problem.unpack(X)
    extra = problem.extra_residuals(X)
    result = SolveResult(
        grid=grid,
        K0=float(np.exp(p_origin[0])),
        residual_solved=history[-1],
        residual_extra=(float(extra[0]), float(extra[1])),
        iterations=iterations,
        history=tuple(history),
        origin_params=tuple(float(v) for v in p_origin),
        center_params=tuple(float(v) for v in p_center),
        options=options,
        window=(problem.left, problem.right),
    )
    logger.info(
        "Converged in %d iterations: K0=%.12g residual=%.3e extra=(%.3e,"
        " %.3e)",
        iterations,
        result.K0,
        result.residual_solved,
        *result.residual_extra,
    )
    return result
