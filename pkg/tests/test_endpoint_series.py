# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import dataclasses

import mpmath
import numpy as np
import pytest

from sp_einstein_fillings import (
    bvp_solver,
    endpoint_series,
    errors,
    ode_system,
)
from sp_einstein_fillings import model as _model

# pylint: disable-next=relative-beyond-top-level, useless-suppression
from .conftest import FULL_LAMBDA  # type: ignore[import-untyped]

DECAY_ORDER = 4


def _params(lambda_: tuple[float, ...]) -> _model.ModelParams:
    return _model.ModelParams.create(1, lambda_)


def _decay_exponent(
    expansion: endpoint_series.Expansion,
    x: np.ndarray,
    local: np.ndarray,
    params: _model.ModelParams,
) -> float:
    state = endpoint_series.evaluate_series(expansion, x)
    res = ode_system.evaluate(
        x, state.y, state.dy, state.ddy, params.n, params.symmetry
    ).r
    worst = np.max(np.abs(res), axis=0)
    slope, _ = np.polyfit(np.log(local), np.log(worst), 1)
    return float(slope)


def test_origin_expansion_of_the_hyperbolic_metric_is_zero() -> None:
    params = _params((1, 1, 1, 1))

    e = endpoint_series.expand_origin(
        params.boundary_data(), 1.0, [0.0], None, params
    )

    assert e.order == params.n + 1
    np.testing.assert_array_equal(e.coeff, 0)


def test_origin_expansion_has_no_odd_powers_below_n() -> None:
    params = _params(FULL_LAMBDA)

    e = endpoint_series.expand_origin(
        params.boundary_data(), 0.99, [0.01, -0.02, 0.005], None, params
    )

    assert e.coeff.shape == (4, params.n + 2)
    np.testing.assert_array_equal(e.coeff[:, 1 : params.n : 2], 0)
    np.testing.assert_allclose(
        e.coeff[:, 0], np.log([0.99, *params.boundary_data().t0])
    )
    np.testing.assert_array_equal(
        e.coeff[1:, params.n], [0.01, -0.02, 0.005]
    )


def test_origin_curvature_follows_the_constraint_by_default() -> None:
    params = _params((0.9, 0.9, 0.9, 1))
    bd = params.boundary_data()

    e = endpoint_series.expand_origin(bd, 0.99, [0.0], None, params)

    assert e.curvature == endpoint_series.fg_curvature(bd, 0.99, params.n)
    assert e.coeff[0, 2] == e.curvature
    assert e.free == ("log_K0", "c_1_2", "c_2_7")


@pytest.mark.parametrize(
    "lambda_",
    [
        pytest.param((0.9, 0.9, 0.9, 1), id="sp1"),
        pytest.param((1.1, 0.9, 0.9, 1), id="u1"),
        pytest.param(FULL_LAMBDA, id="full"),
    ],
)
def test_origin_expansion_residual_decays_with_the_order(
    lambda_: tuple[float, ...],
) -> None:
    params = _params(lambda_)
    x = np.geomspace(5e-3, 5e-2, 8)
    e = endpoint_series.expand_origin(
        params.boundary_data(),
        0.99,
        np.zeros(params.m - 1),
        DECAY_ORDER,
        params,
    )

    exponent = _decay_exponent(e, x, x, params)

    assert exponent >= DECAY_ORDER - 1.5


@pytest.mark.parametrize("order", [1, 10])
def test_origin_expansion_rejects_unsupported_orders(order: int) -> None:
    params = _params((1, 1, 1, 1))

    with pytest.raises(errors.UnsupportedOrderError):
        endpoint_series.expand_origin(
            params.boundary_data(), 1.0, [0.0], order, params
        )


@pytest.mark.parametrize(
    ("K0", "nonlocal_"), [(1.5, [0.0]), (0.0, [0.0]), (0.9, [0.0, 0.0])]
)
def test_origin_expansion_rejects_invalid_data(
    K0: float, nonlocal_: list[float]
) -> None:
    params = _params((1, 1, 1, 1))

    with pytest.raises(errors.InvalidParameterError):
        endpoint_series.expand_origin(
            params.boundary_data(), K0, nonlocal_, None, params
        )


def test_center_expansion_without_free_data_is_zero() -> None:
    params = _params(FULL_LAMBDA)

    e = endpoint_series.expand_center([0.0, 0.0, 0.0], None, params)

    assert e.order == endpoint_series.DEFAULT_CENTER_ORDER
    np.testing.assert_array_equal(e.coeff, 0)


def test_center_expansion_vanishes_to_first_order() -> None:
    params = _params(FULL_LAMBDA)

    e = endpoint_series.expand_center([0.05, -0.02, 0.01], 6, params)

    np.testing.assert_array_equal(e.coeff[:, :2], 0)
    np.testing.assert_array_equal(e.coeff[1:, 2], [0.05, -0.02, 0.01])
    assert e.free == ("d_2_2", "d_3_2", "d_4_2")


@pytest.mark.parametrize(
    "lambda_",
    [
        pytest.param((0.9, 0.9, 0.9, 1), id="sp1"),
        pytest.param(FULL_LAMBDA, id="full"),
    ],
)
def test_center_expansion_residual_decays_with_the_order(
    lambda_: tuple[float, ...],
) -> None:
    params = _params(lambda_)
    u = np.geomspace(2e-2, 8e-2, 8)
    free = np.linspace(0.05, -0.03, params.m - 1)
    e = endpoint_series.expand_center(free, DECAY_ORDER, params)

    exponent = _decay_exponent(e, 1 - u, u, params)

    assert exponent >= DECAY_ORDER - 1.5


def test_center_expansion_rejects_low_orders() -> None:
    params = _params((1, 1, 1, 1))

    with pytest.raises(errors.UnsupportedOrderError):
        endpoint_series.expand_center([0.0], 2, params)


def test_series_state_of_a_single_term() -> None:
    c = 0.7
    coeff = np.array([[0.0, 0.0, c]])
    x = np.array([0.01, 0.05])

    y, dy, ddy = endpoint_series.series_state(coeff, x, at_center=False)

    np.testing.assert_allclose(y[0], c * x * x)
    np.testing.assert_allclose(dy[0], 2 * c * x)
    np.testing.assert_allclose(ddy[0], 2 * c)


def test_series_state_at_the_center_flips_the_slope() -> None:
    coeff = np.array([[0.0, 0.0, 1.0]])

    _, dy, ddy = endpoint_series.series_state(coeff, 0.1, at_center=True)

    assert dy[0] == pytest.approx(-0.2)
    assert ddy[0] == pytest.approx(2.0)


def test_evaluate_series_of_a_zero_expansion() -> None:
    params = _params((1, 1, 1, 1))
    e = endpoint_series.expand_origin(
        params.boundary_data(), 1.0, [0.0], None, params
    )

    state = endpoint_series.evaluate_series(e, np.array([0.0, 0.05, 0.1]))

    np.testing.assert_array_equal(state.y, 0)
    np.testing.assert_array_equal(state.dy, 0)
    np.testing.assert_array_equal(state.ddy, 0)


def test_evaluate_series_matches_extended_precision() -> None:
    params = _params(FULL_LAMBDA)
    x = 0.05
    e = endpoint_series.expand_origin(
        params.boundary_data(), 0.98, [0.01, -0.02, 0.005], None, params
    )

    state = endpoint_series.evaluate_series(e, x)

    with mpmath.workdps(40):
        xm = mpmath.mpf(x)
        for j in range(e.m):
            c = [mpmath.mpf(float(v)) for v in e.coeff[j]]
            y = sum(cp * xm**p for p, cp in enumerate(c))
            dy = sum(p * cp * xm ** (p - 1) for p, cp in enumerate(c) if p)
            assert float(state.y[j]) == pytest.approx(float(y), abs=1e-14)
            assert float(state.dy[j]) == pytest.approx(float(dy), abs=1e-14)


@pytest.mark.parametrize("x", [0.2, -0.01])
def test_evaluate_series_outside_the_trust_radius(x: float) -> None:
    params = _params((1, 1, 1, 1))
    e = endpoint_series.expand_origin(
        params.boundary_data(), 1.0, [0.0], None, params
    )

    with pytest.raises(errors.DomainError):
        endpoint_series.evaluate_series(e, x)


def test_evaluate_series_at_the_center_measures_from_one() -> None:
    params = _params((1, 1, 1, 1))
    e = endpoint_series.expand_center([0.1], None, params)

    state = endpoint_series.evaluate_series(e, 0.99)

    assert state.y[1] == pytest.approx(0.1 * 0.01**2, rel=0.1)
    with pytest.raises(errors.DomainError):
        endpoint_series.evaluate_series(e, 0.5)


def test_parity_defect_of_the_hyperbolic_solution() -> None:
    params = _params((1, 1, 1, 1))
    mesh = bvp_solver.build_mesh(400, 2)
    grid = bvp_solver.SolutionGrid.zeros(params, mesh)

    defects = endpoint_series.parity_defect(grid, [1, 3, 5])

    np.testing.assert_allclose(defects, 0, atol=1e-12)


def test_parity_defect_of_a_converged_solution(
    sp1_result: bvp_solver.SolveResult,
) -> None:
    cap = sp1_result.grid.x[sp1_result.window[0]]

    defects = endpoint_series.parity_defect(sp1_result.grid, [1, 3, 5])

    assert cap < endpoint_series.PARITY_RADIUS / 2
    assert np.all(defects < 1e-5)


def test_parity_defect_flags_an_injected_cubic(
    sp1_result: bvp_solver.SolveResult,
) -> None:
    grid = sp1_result.grid
    x = grid.x
    corrupted = dataclasses.replace(
        grid, y=grid.y + 1e-1 * x**3, dy=grid.dy + 3e-1 * x**2
    )

    defects = endpoint_series.parity_defect(corrupted, [1, 3, 5])

    assert defects[1] > 1e-5


def test_parity_defect_needs_resolution_near_the_origin() -> None:
    params = _params((1, 1, 1, 1))
    grid = bvp_solver.SolutionGrid.zeros(params, bvp_solver.build_mesh(16, 1))

    with pytest.raises(errors.InsufficientResolutionError):
        endpoint_series.parity_defect(grid)
