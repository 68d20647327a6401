# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Discretization and solution of the boundary value problem on ``[0, 1]``.

The collocation solver ([`newton_solve`][sp_einstein_fillings.bvp_solver.newton_solve])
works on a graded mesh and is driven from the round sphere by
[`continuation_solve`][sp_einstein_fillings.bvp_solver.continuation_solve].
[`shooting_oracle`][sp_einstein_fillings.bvp_solver.shooting_oracle] solves
the same problem independently for comparison.
"""

from __future__ import annotations

import logging

from .. import model as _model
from .collocation import BandedMatrix, CollocationProblem, assemble
from .continuation import (
    ContinuationPath,
    ContinuationStep,
    continuation_solve,
    family_boundary_data,
)
from .grid import SolutionGrid
from .mesh import Mesh, build_mesh, cap_width, collocation_window
from .newton import SolveResult, newton_solve
from .options import ContinuationOptions, SolveOptions
from .shooting import MATCH_RANGE, ShootingProblem, shooting_oracle

__all__ = [
    "MATCH_RANGE",
    "BandedMatrix",
    "CollocationProblem",
    "ContinuationOptions",
    "ContinuationPath",
    "ContinuationStep",
    "Mesh",
    "ShootingProblem",
    "SolutionGrid",
    "SolveOptions",
    "SolveResult",
    "assemble",
    "build_mesh",
    "cap_width",
    "collocation_window",
    "continuation_solve",
    "family_boundary_data",
    "newton_solve",
    "shooting_oracle",
    "solve",
]

logger = logging.getLogger(__name__)


def solve(
    params: _model.ModelParams,
    options: SolveOptions | None = None,
    continuation: ContinuationOptions | None = None,
) -> ContinuationPath:
    """Solve for the boundary data of ``params`` by continuation.

    High level entry used by the command line. Round data are solved
    directly; everything else follows the family from the round sphere
    in ``continuation.steps`` steps.

    Raises
    ------
    StepCollapseError
        If the continuation cannot reach the target.
    """
    continuation = continuation or ContinuationOptions()
    bd = params.boundary_data()
    logger.debug(
        "Solving k=%d class=%s t0=%s in %d steps",
        params.k,
        params.symmetry.value,
        bd.t0,
        continuation.steps,
    )
    return continuation_solve(
        bd, continuation.steps, params, options, continuation
    )
