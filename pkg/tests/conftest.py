# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Global fixtures for pytest."""

import pytest

from sp_einstein_fillings import bvp_solver
from sp_einstein_fillings import model as _model

MESH_SIZE = 200
ROUND_LAMBDA = (1.0, 1.0, 1.0, 1.0)
SP1_LAMBDA = (0.95, 0.95, 0.95, 1.0)
U1_LAMBDA = (1.05, 0.95, 0.95, 1.0)
FULL_LAMBDA = (1.05, 0.97, 0.93, 1.0)
"""Pairwise distinct ratios inside the regime of the structural checks."""
SYMMETRY_PARAMS = [
    pytest.param(_model.SymmetryClass.FULL, id="full"),
    pytest.param(_model.SymmetryClass.SP1, id="sp1"),
    pytest.param(_model.SymmetryClass.U1, id="u1"),
]


def _continued(
    lambda_: tuple[float, float, float, float], mesh_size: int = MESH_SIZE
) -> bvp_solver.SolveResult:
    params = _model.ModelParams.create(1, lambda_)
    path = bvp_solver.solve(
        params,
        bvp_solver.SolveOptions(mesh_size=mesh_size),
        bvp_solver.ContinuationOptions(steps=4),
    )
    assert path.target_reached
    return path.final


@pytest.fixture(scope="session")
def round_result() -> bvp_solver.SolveResult:
    """Return the hyperbolic solution on the default test mesh."""
    params = _model.ModelParams.create(1, ROUND_LAMBDA)
    mesh = bvp_solver.build_mesh(MESH_SIZE, 2.0)
    return bvp_solver.newton_solve(
        bvp_solver.SolutionGrid.zeros(params, mesh),
        params,
        bvp_solver.SolveOptions(mesh_size=MESH_SIZE),
    )


@pytest.fixture(scope="session")
def sp1_result() -> bvp_solver.SolveResult:
    return _continued(SP1_LAMBDA, mesh_size=400)


@pytest.fixture(scope="session")
def u1_result() -> bvp_solver.SolveResult:
    return _continued(U1_LAMBDA)


@pytest.fixture(scope="session")
def full_result() -> bvp_solver.SolveResult:
    return _continued(FULL_LAMBDA)
