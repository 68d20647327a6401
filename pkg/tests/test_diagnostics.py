# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import math
import statistics

import numpy as np
import pytest

from sp_einstein_fillings import bvp_solver, checks, diagnostics, errors
from sp_einstein_fillings import model as _model

# pylint: disable-next=relative-beyond-top-level, useless-suppression
from .conftest import MESH_SIZE  # type: ignore[import-untyped]

RESULT_FIXTURES = [
    pytest.param("sp1_result", id="sp1"),
    pytest.param("u1_result", id="u1"),
    pytest.param("full_result", id="full"),
]


def _solve(
    lambda_: tuple[float, ...], mesh_size: int = MESH_SIZE, steps: int = 4
) -> bvp_solver.SolveResult:
    params = _model.ModelParams.create(1, lambda_)
    path = bvp_solver.solve(
        params,
        bvp_solver.SolveOptions(mesh_size=mesh_size),
        bvp_solver.ContinuationOptions(steps=steps),
    )
    return path.final


def test_total_variation_of_a_constant_is_zero() -> None:
    assert diagnostics.total_variation(np.full(11, 0.3)) == 0.0


def test_total_variation_of_a_single_bump() -> None:
    x = np.linspace(0, 1, 101)

    tv = diagnostics.total_variation(x * (1 - x), x)

    assert tv == pytest.approx(0.5, abs=1e-12)


def test_total_variation_uses_derivatives_when_given() -> None:
    x = np.linspace(0, 1, 201)
    values = np.sin(2 * np.pi * x)

    plain = diagnostics.total_variation(values, x)
    hermite = diagnostics.total_variation(
        values, x, 2 * np.pi * np.cos(2 * np.pi * x)
    )

    assert plain == pytest.approx(4, rel=1e-4)
    assert hermite == pytest.approx(4, rel=1e-6)


def test_total_variation_is_not_inflated_by_sampling() -> None:
    x = np.linspace(0, 1, 1001)

    tv = diagnostics.total_variation(x**3, x)

    assert tv == pytest.approx(1.0)


@pytest.mark.parametrize(
    "samples", [[1.0], [[1.0, 2.0]], [0.0, math.nan, 1.0]]
)
def test_total_variation_rejects_invalid_profiles(
    samples: list[float],
) -> None:
    with pytest.raises(errors.InvalidParameterError):
        diagnostics.total_variation(samples)


@pytest.mark.parametrize(
    ("values", "expected"),
    [
        pytest.param([1.0, -1.0, 1.0], (2, 1), id="alternating"),
        pytest.param([1e-12, -1e-12, 2.0], (0, 1), id="noise"),
        pytest.param([-3.0, -1.0, -2.0], (0, -1), id="negative"),
        pytest.param([1e-13, -1e-13], (0, 0), id="vanishing"),
    ],
)
def test_count_sign_changes(
    values: list[float], expected: tuple[int, int]
) -> None:
    assert diagnostics.count_sign_changes(values) == expected


def test_compare_a_solution_with_itself(
    full_result: bvp_solver.SolveResult,
) -> None:
    report = diagnostics.compare_solutions(full_result, full_result)

    assert report.sup_norm == 0.0
    assert report.V == (0.0, 0.0, 0.0, 0.0)
    assert report.all_flags


def test_compare_solutions_across_classes_and_meshes(
    sp1_result: bvp_solver.SolveResult,
    u1_result: bvp_solver.SolveResult,
) -> None:
    report = diagnostics.compare_solutions(sp1_result, u1_result)

    assert len(report.z) == 4
    assert len(report.x) == len(sp1_result.grid.x)
    assert report.V == report.V_full
    log_ratio = math.log(sp1_result.K0 / u1_result.K0)
    assert report.V[0] >= abs(log_ratio) - 1e-12
    assert report.sup_norm >= math.log(1.05 / 0.95) - 1e-12


def test_compare_solutions_of_the_same_data_rejects_other_data(
    sp1_result: bvp_solver.SolveResult,
    u1_result: bvp_solver.SolveResult,
) -> None:
    with pytest.raises(errors.InvalidComparisonError, match="t0"):
        diagnostics.compare_solutions(sp1_result, u1_result, same_data=True)

    report = diagnostics.compare_solutions(
        sp1_result, sp1_result, same_data=True
    )
    assert report.sup_norm == 0.0


def test_compare_solutions_of_different_rank(
    round_result: bvp_solver.SolveResult,
) -> None:
    params = _model.ModelParams.create(2, (1, 1, 1, 1))
    mesh = bvp_solver.build_mesh(64, 2)
    other = bvp_solver.newton_solve(
        bvp_solver.SolutionGrid.zeros(params, mesh),
        params,
        bvp_solver.SolveOptions(mesh_size=64),
    )

    with pytest.raises(errors.InvalidComparisonError):
        diagnostics.compare_solutions(round_result, other)


def test_perturbed_starts_agree_near_the_round_data() -> None:
    params = _model.ModelParams.create(1, (0.97, 1.02, 0.99, 1.0))
    options = bvp_solver.SolveOptions(mesh_size=100)
    result = bvp_solver.newton_solve(
        bvp_solver.SolutionGrid.zeros(
            params, bvp_solver.build_mesh(100, options.grading)
        ),
        params,
        options,
    )

    report = diagnostics.uniqueness_probe(result, count=10, seed=7)

    assert report.count == 10
    assert report.converged == 10
    assert report.max_pairwise_sup <= 1e-8
    assert report.max_variation <= 1e-8


def test_perturbed_guess_keeps_the_endpoint_values() -> None:
    params = _model.ModelParams.create(1, (1, 1, 1, 1))
    base = bvp_solver.SolutionGrid.zeros(
        params, bvp_solver.build_mesh(64, 2)
    )

    guess = diagnostics.perturbed_guess(base, np.random.default_rng(0), 0.3)

    np.testing.assert_array_equal(guess.y[:, [0, -1]], 0)
    np.testing.assert_array_equal(guess.dy[:, [0, -1]], 0)
    assert 0 < np.max(np.abs(guess.y)) <= 0.3


def test_monotonicity_in_regime(full_result: bvp_solver.SolveResult) -> None:
    report = diagnostics.check_monotonicity(full_result)

    assert report.in_regime
    assert report.condition_3_1_held
    assert report.y1_positive
    assert report.ratios_monotone
    assert not any(r.excluded for r in report.ratio_signs)


def test_monotonicity_excludes_repeated_unknowns(
    u1_result: bvp_solver.SolveResult,
) -> None:
    report = diagnostics.check_monotonicity(u1_result)

    excluded = [r.pair for r in report.ratio_signs if r.excluded]
    assert excluded == [(3, 4)]
    assert not report.in_regime


@pytest.mark.parametrize("fixture", RESULT_FIXTURES)
def test_k_stays_monotone_and_below_one(
    fixture: str, request: pytest.FixtureRequest
) -> None:
    result: bvp_solver.SolveResult = request.getfixturevalue(fixture)

    report = diagnostics.check_bounds(result)

    assert report.K_monotone
    assert report.K_le_one
    assert report.K_range[0] == pytest.approx(result.K0)
    assert report.delta > 0


def test_bounds_hold_in_regime(full_result: bvp_solver.SolveResult) -> None:
    report = diagnostics.check_bounds(full_result)

    assert report.in_regime
    assert report.hard_bounds_hold
    assert report.K0_above_bound
    assert report.t_upper_margin >= 0


def _sampled_full_data(count: int, seed: int) -> list[tuple[float, ...]]:
    rng = np.random.default_rng(seed)
    samples: list[tuple[float, ...]] = []
    while len(samples) < count:
        t0 = rng.uniform(0.8, 1.25, size=3)
        gaps = np.abs(np.subtract.outer(t0, t0))[np.triu_indices(3, 1)]
        if np.min(gaps) >= 0.01:
            samples.append((*map(float, t0), 1.0))
    return samples


@pytest.fixture(scope="module")
def sampled_full_results() -> list[bvp_solver.SolveResult]:
    return [
        _solve(lambda_, mesh_size=100)
        for lambda_ in _sampled_full_data(20, seed=11)
    ]


def test_sampled_full_data_satisfy_the_triangle_conditions() -> None:
    for lambda_ in _sampled_full_data(20, seed=11):
        params = _model.ModelParams.create(1, lambda_)
        conditions = _model.check_conditions(params.boundary_data())

        assert params.symmetry is _model.SymmetryClass.FULL
        assert all(conditions.cond_3_1)


def test_monotonicity_on_sampled_full_data(
    sampled_full_results: list[bvp_solver.SolveResult],
) -> None:
    assert len(sampled_full_results) == 20
    for result in sampled_full_results:
        report = diagnostics.check_monotonicity(result)

        assert report.in_regime
        assert report.y1prime_min > 0
        assert report.ratios_monotone
        assert not any(r.excluded for r in report.ratio_signs)


def test_bounds_on_sampled_full_data(
    sampled_full_results: list[bvp_solver.SolveResult],
) -> None:
    for result in sampled_full_results:
        report = diagnostics.check_bounds(result)

        assert report.t_upper_margin >= -1e-9
        assert report.K_monotone
        assert report.K_le_one
        assert report.y1prime_cap_margin >= -1e-9


def test_k0_stays_above_its_lower_bound() -> None:
    result = _solve((0.9, 0.9, 0.9, 1.0), steps=8)

    report = diagnostics.check_bounds(result)

    assert result.K0 >= 0.98845
    assert result.K0 < 1
    assert report.K0_above_bound
    assert report.K0_lower_bound <= 0.98845


def test_bounds_of_the_sp1_class(sp1_result: bvp_solver.SolveResult) -> None:
    report = diagnostics.check_bounds(sp1_result)

    assert report.sp1_lower_bound_held
    assert report.tau == pytest.approx(3.0)
    assert report.t_min[0] <= 0.95
    assert report.t_max[0] == pytest.approx(1.0, abs=1e-9)


def test_apriori_constants(full_result: bvp_solver.SolveResult) -> None:
    report = diagnostics.check_apriori(full_result)

    assert all(0 < c < math.inf for c in report.constants)
    assert report.y1_integral_defect <= 1e-5


def test_weyl_estimates_vanish_on_hyperbolic_space(
    round_result: bvp_solver.SolveResult,
) -> None:
    report = diagnostics.weyl_estimates(round_result)

    assert report.eps_obs == 0.0
    assert report.decay_consts == (0.0, 0.0, 0.0, 0.0)
    assert not report.exceeds_cap


def test_weyl_estimates_along_a_path() -> None:
    params = _model.ModelParams.create(1, (0.9, 0.9, 0.9, 1.0))
    path = bvp_solver.continuation_solve(
        params.boundary_data(),
        8,
        params,
        bvp_solver.SolveOptions(mesh_size=100),
    )

    reports = diagnostics.weyl_along_path(path)

    assert len(reports) == len(path.steps)
    assert len(path.steps) >= 9
    assert reports[0].eps_obs == 0.0
    for report in reports[1:]:
        assert 0 < report.eps_obs <= report.weyl_cap
    for component in range(4):
        consts = [r.decay_consts[component] for r in reports[1:]]
        assert all(math.isfinite(c) for c in consts)
        assert max(consts) <= 10 * statistics.median(consts)


def test_classify_extrema_rejects_the_full_class(
    full_result: bvp_solver.SolveResult,
) -> None:
    with pytest.raises(errors.InvalidClassError):
        diagnostics.classify_extrema(full_result)


@pytest.mark.parametrize(
    "fixture",
    [
        pytest.param("sp1_result", id="sp1"),
        pytest.param("u1_result", id="u1"),
    ],
)
def test_classify_extrema_of_reduced_solutions(
    fixture: str, request: pytest.FixtureRequest
) -> None:
    result: bvp_solver.SolveResult = request.getfixturevalue(fixture)

    report = diagnostics.classify_extrema(result)

    assert report.symmetry is result.params.symmetry
    assert report.all_hold
    assert (report.sign_rule is None) is (
        result.params.symmetry is _model.SymmetryClass.SP1
    )


@pytest.mark.parametrize(("offset", "sign"), [(0.02, -1), (-0.02, 1)])
def test_u1_initial_slope_follows_the_sign_rule(
    offset: float, sign: int
) -> None:
    t2 = 0.95
    t1 = _model.t1_star(t2, 7) + offset
    result = _solve((t1, t2, t2, 1.0))

    report = diagnostics.classify_extrema(result)

    rule = report.sign_rule
    assert rule is not None
    assert np.sign(rule.predicted) == sign
    assert rule.initial_slope_sign == sign
    assert rule.consistent


def test_locate_extrema_of_a_sampled_profile() -> None:
    x = np.linspace(0, 1, 201)
    dy = np.cos(3 * np.pi * x)
    ddy = -3 * np.pi * np.sin(3 * np.pi * x)

    found = diagnostics.locate_extrema(x, dy, ddy)

    assert [kind for _, kind in found] == ["max", "min", "max"]
    np.testing.assert_allclose(
        [root for root, _ in found], [1 / 6, 1 / 2, 5 / 6], atol=1e-6
    )


def test_run_diagnostics_bundles_every_report(
    sp1_result: bvp_solver.SolveResult,
) -> None:
    bundle = diagnostics.run_diagnostics(sp1_result, decay_start=0.6)

    assert bundle.symmetry is _model.SymmetryClass.SP1
    assert bundle.extrema is not None
    assert bundle.weyl.decay_start == 0.6


@pytest.mark.parametrize("fixture", RESULT_FIXTURES)
def test_battery_passes_on_converged_solutions(
    fixture: str, request: pytest.FixtureRequest
) -> None:
    result: bvp_solver.SolveResult = request.getfixturevalue(fixture)

    outcomes = checks.verification_battery(result)

    assert [o.name for o in outcomes] == list(checks.CHECKS)
    assert not [o.name for o in outcomes if o.failed]


def test_battery_runs_the_hard_checks_in_regime(
    full_result: bvp_solver.SolveResult,
) -> None:
    outcomes = checks.verification_battery(full_result)

    skipped = {o.name for o in outcomes if o.skipped}
    assert skipped == {"extrema", "u1_sign_rule"}


def test_battery_runs_selected_checks(
    round_result: bvp_solver.SolveResult,
) -> None:
    outcomes = checks.verification_battery(
        round_result, names=["residual", "K_le_one"]
    )

    assert [o.name for o in outcomes] == ["residual", "K_le_one"]
    assert all(o.passed for o in outcomes)


def test_battery_fails_hard_when_the_shooting_fails(
    round_result: bvp_solver.SolveResult,
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    def fail(*_: object) -> float:
        raise errors.BranchViolationError("Shooting integration blew up")

    monkeypatch.setattr(checks, "dual_method_difference", fail)

    outcomes = checks.verification_battery(
        round_result, names=["residual"], shooting=True
    )

    shooting = outcomes[-1]
    assert shooting.name == "dual_method"
    assert shooting.hard
    assert shooting.failed
    assert "blew up" in shooting.detail


def test_battery_rejects_unknown_checks(
    round_result: bvp_solver.SolveResult,
) -> None:
    with pytest.raises(errors.InvalidParameterError, match="nope"):
        checks.verification_battery(round_result, names=["residual", "nope"])


@pytest.mark.parametrize(
    ("outcome", "status"),
    [
        pytest.param(
            diagnostics.CheckOutcome(name="a", hard=True, passed=False),
            "FAIL",
            id="hard-failure",
        ),
        pytest.param(
            diagnostics.CheckOutcome(name="a", hard=False, passed=False),
            "warn",
            id="soft-failure",
        ),
        pytest.param(
            diagnostics.CheckOutcome(
                name="a", hard=True, passed=False, skipped=True
            ),
            "skip",
            id="skipped",
        ),
        pytest.param(
            diagnostics.CheckOutcome(
                name="a", hard=True, passed=True, margin=0.5
            ),
            "pass",
            id="passed",
        ),
    ],
)
def test_check_outcome_render(
    outcome: diagnostics.CheckOutcome, status: str
) -> None:
    line = outcome.render()

    assert line.startswith(status)
    assert outcome.failed is (status == "FAIL")
