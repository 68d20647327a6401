# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import math

import pytest

from sp_einstein_fillings import errors
from sp_einstein_fillings import model as _model

N7 = 7


@pytest.mark.parametrize(("k", "expected"), [(1, 7), (2, 11), (5, 23)])
def test_dimension_from_k(k: int, expected: int) -> None:
    assert _model.dimension_from_k(k) == expected


@pytest.mark.parametrize("k", [0, -1, True])
def test_dimension_from_k_rejects_invalid_rank(k: int) -> None:
    with pytest.raises(errors.InvalidParameterError):
        _model.dimension_from_k(k)


@pytest.mark.parametrize(
    ("lambda_", "symmetry", "permutation"),
    [
        pytest.param(
            (1, 1, 1, 1), _model.SymmetryClass.SP1, (0, 1, 2), id="round"
        ),
        pytest.param(
            (1.1, 0.95, 0.95, 1),
            _model.SymmetryClass.U1,
            (0, 1, 2),
            id="u1-canonical",
        ),
        pytest.param(
            (0.95, 1.1, 0.95, 1),
            _model.SymmetryClass.U1,
            (1, 0, 2),
            id="u1-reordered",
        ),
        pytest.param(
            (1.1, 1.05, 0.95, 1),
            _model.SymmetryClass.FULL,
            (0, 1, 2),
            id="full",
        ),
        pytest.param(
            (2, 2, 2, 2), _model.SymmetryClass.SP1, (0, 1, 2), id="scaled"
        ),
    ],
)
def test_classify_symmetry(
    lambda_: tuple[float, ...],
    symmetry: _model.SymmetryClass,
    permutation: tuple[int, int, int],
) -> None:
    result = _model.classify_symmetry(lambda_)

    assert result.symmetry is symmetry
    assert result.permutation == permutation


def test_classify_symmetry_uses_relative_tolerance() -> None:
    lambda_ = (1.0, 1.0 + 1e-14, 1.0 - 1e-14, 1.0)

    assert _model.classify_symmetry(lambda_).symmetry is (
        _model.SymmetryClass.SP1
    )
    assert _model.classify_symmetry(lambda_, tol=0).symmetry is (
        _model.SymmetryClass.FULL
    )


@pytest.mark.parametrize(
    "lambda_",
    [(1, 1, 1), (1, -1, 1, 1), (1, 1, 0, 1), (1, 1, float("nan"), 1)],
)
def test_classify_symmetry_rejects_invalid_coefficients(
    lambda_: tuple[float, ...],
) -> None:
    with pytest.raises(errors.InvalidParameterError):
        _model.classify_symmetry(lambda_)


def test_create_normalizes_and_classifies() -> None:
    params = _model.ModelParams.create(1, (0.95, 1.1, 0.95, 1.0))

    assert params.n == 7
    assert params.m == 3
    assert params.symmetry is _model.SymmetryClass.U1
    assert params.boundary_data().t0 == (1.1, 0.95, 0.95)


def test_create_allows_forcing_the_full_class() -> None:
    params = _model.ModelParams.create(1, (1, 1, 1, 1), "full")

    assert params.symmetry is _model.SymmetryClass.FULL
    assert params.m == 4


def test_create_allows_forcing_u1_on_equal_ratios() -> None:
    params = _model.ModelParams.create(1, (0.95, 0.95, 0.95, 1), "u1")

    assert params.symmetry is _model.SymmetryClass.U1
    assert params.permutation == (0, 1, 2)
    assert params.m == 3


def test_create_rejects_forcing_sp1_on_u1_data() -> None:
    with pytest.raises(errors.InvalidParameterError, match="detected u1"):
        _model.ModelParams.create(1, (1.05, 0.95, 0.95, 1), "sp1")


def test_create_rejects_inconsistent_forced_class() -> None:
    with pytest.raises(errors.InvalidParameterError, match="symmetry"):
        _model.ModelParams.create(1, (1.1, 1.05, 0.95, 1), "sp1")


def test_create_rejects_invalid_rank() -> None:
    with pytest.raises(errors.InvalidParameterError):
        _model.ModelParams.create(0, (1, 1, 1, 1))


def test_params_dump_uses_the_lambda_alias() -> None:
    params = _model.ModelParams.create(2, (1.1, 1.05, 0.95, 1))

    dumped = params.model_dump(mode="json", by_alias=True)

    assert dumped["lambda"] == [1.1, 1.05, 0.95, 1.0]
    assert _model.ModelParams.model_validate(dumped) == params


def test_with_boundary_data_keeps_the_permutation() -> None:
    params = _model.ModelParams.create(1, (0.95, 1.1, 0.95, 1.0))
    bd = _model.BoundaryData(t0=(1.2, 0.9, 0.9))

    moved = params.with_boundary_data(bd)

    assert moved.permutation == params.permutation
    assert moved.boundary_data() == bd
    assert moved.lambda_ == (0.9, 1.2, 0.9, 1.0)


def test_boundary_data_rejects_nonpositive_ratios() -> None:
    with pytest.raises(ValueError, match="positive"):
        _model.BoundaryData(t0=(1.0, 0.0, 1.0))


@pytest.mark.parametrize(
    ("t2", "n", "expected"),
    [
        (1.0, 7, 1.0),
        (1.0, 11, 1.0),
        (3.0, 7, 0.0),
        (0.9, 7, (12 * 0.81 - 4 * 0.729) / (6 * 0.81 + 2)),
    ],
)
def test_t1_star(t2: float, n: int, expected: float) -> None:
    assert _model.t1_star(t2, n) == pytest.approx(expected, abs=1e-12)


def test_t1_star_reference_value() -> None:
    assert _model.t1_star(0.9, N7) == pytest.approx(0.991837, abs=1e-6)


@pytest.mark.parametrize(
    ("t1_0", "t3_0", "expected"),
    [(1.0, 1.0, 1.2), (1.5, 1.5, 1.5), (1.0, 0.5, 12 / 8)],
)
def test_t_upper_bound(t1_0: float, t3_0: float, expected: float) -> None:
    assert _model.t_upper_bound(t1_0, t3_0, N7) == pytest.approx(expected)


def test_t1_threshold() -> None:
    expected = (36 + math.sqrt(4496)) / 200

    assert _model.t1_threshold(N7) == pytest.approx(expected)
    assert _model.t1_threshold(N7) == pytest.approx(0.515261, abs=1e-6)
    assert _model.t1_threshold(N7) < 1


def test_scalar_thresholds() -> None:
    assert _model.weyl_cap(N7) == pytest.approx(math.sqrt(336))
    assert _model.sp1_t1_lower_bound(N7) == pytest.approx(
        (6 / 42) ** (7 / 4)
    )
    assert _model.sp1_extremum_threshold(N7) == pytest.approx(0.2)
    assert _model.u1_t2_minimum_cap(N7) == pytest.approx(0.5)
    assert _model.u1_t1_cap_at_t2_minimum(0.25, N7) == pytest.approx(
        (1 - 8 * 0.0625) / 2.5
    )


def test_quotient_form_of_the_round_state() -> None:
    assert _model.quotient_form(1.0, 1.0, 1.0) == 3.0


@pytest.mark.parametrize(
    ("t0", "tau"),
    [
        pytest.param((1.0, 1.0, 1.0), 3.0, id="round"),
        pytest.param((1.9, 1.0, 1.0), 3.0, id="one-large"),
        pytest.param((0.9, 0.9, 0.9), 3.0, id="equal"),
        pytest.param(
            (1.2, 1.0, 0.8),
            min(
                _model.tau_quadratic(a, b)
                for a in (1.0, 1.5)
                for b in (1.0, 1.25)
            ),
            id="distinct",
        ),
    ],
)
def test_check_conditions_tau_is_the_corner_minimum(
    t0: tuple[float, float, float], tau: float
) -> None:
    report = _model.check_conditions(_model.BoundaryData(t0=t0))

    assert report.tau_margin == pytest.approx(tau)


def test_check_conditions_triangle_conditions() -> None:
    holds = _model.check_conditions(_model.BoundaryData(t0=(1.9, 1.0, 1.0)))
    fails = _model.check_conditions(_model.BoundaryData(t0=(2.5, 1.0, 1.0)))

    assert holds.cond_3_1 == (True, True, True)
    assert holds.holds
    assert fails.cond_3_1 == (False, True, True)
    assert not fails.holds


def test_check_conditions_reports_floor_and_smallness() -> None:
    report = _model.check_conditions(_model.BoundaryData(t0=(1.2, 1.0, 0.7)))

    assert report.sigma_floor == 0.7
    assert report.smallness == pytest.approx(0.5)
    assert report.in_stability_range


@pytest.mark.parametrize(
    ("t0", "expected"),
    [
        ((2 / 3, 1.0, 1.3), True),
        ((0.6, 1.0, 1.0), False),
        ((4 / 3, 1.0, 1.0), False),
    ],
)
def test_in_stability_range(
    t0: tuple[float, float, float], expected: bool
) -> None:
    assert _model.in_stability_range(_model.BoundaryData(t0=t0)) is expected


def test_k0_lower_bound_equal_ratios() -> None:
    bd = _model.BoundaryData(t0=(0.9, 0.9, 0.9))
    tau = _model.check_conditions(bd).tau_margin
    bracket = 4 * (12 - 2.7) + 2 * tau * 0.9 / 0.81
    expected = (0.9 ** (3 / 7) * bracket / 42) ** 7

    bound = _model.k0_lower_bound(bd, N7, tau)

    assert bracket == pytest.approx(43.8667, abs=1e-4)
    assert bound == pytest.approx(expected, rel=1e-12)
    assert 0.988 < bound < 1


def test_k0_lower_bound_of_the_round_sphere_is_one() -> None:
    bd = _model.BoundaryData(t0=(1.0, 1.0, 1.0))

    assert _model.k0_lower_bound(bd, N7, 3.0) == pytest.approx(1.0)


def test_k0_lower_bound_clamps_nonpositive_brackets() -> None:
    bd = _model.BoundaryData(t0=(5.0, 5.0, 5.0))

    assert _model.k0_lower_bound(bd, N7, 0.0) == 0.0
