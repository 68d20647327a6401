# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import csv
import json
import logging
import pathlib

import numpy as np
import pytest

from sp_einstein_fillings import __version__, bvp_solver, errors, serializers
from sp_einstein_fillings import model as _model


def test_dump_and_load_restore_the_result_bitwise(
    tmp_path: pathlib.Path, full_result: bvp_solver.SolveResult
) -> None:
    path = serializers.dump_result(full_result, tmp_path / "result.json")

    loaded, manifest = serializers.load_result(path)

    for name in ("x", "y", "dy", "ddy"):
        np.testing.assert_array_equal(
            getattr(loaded.grid, name), getattr(full_result.grid, name)
        )
    assert loaded.params == full_result.params
    assert loaded.options == full_result.options
    assert loaded.K0 == full_result.K0
    assert loaded.residual_extra == full_result.residual_extra
    assert loaded.history == full_result.history
    assert loaded.origin_params == full_result.origin_params
    assert loaded.center_params == full_result.center_params
    assert loaded.window == full_result.window
    assert manifest.version == __version__
    assert manifest.config_hash == serializers.config_hash(
        full_result.params, full_result.options
    )


def test_result_artifact_carries_derived_fields(
    round_result: bvp_solver.SolveResult,
) -> None:
    data = serializers.result_to_dict(round_result)

    assert data["format"] == serializers.RESULT_FORMAT
    assert data["params"]["lambda"] == [1.0, 1.0, 1.0, 1.0]
    assert np.allclose(data["derived"]["K"], 1.0)
    assert len(data["derived"]["t"]) == 3
    assert len(data["derived"]["I"]) == 4


def test_config_hash_tracks_parameters_and_options() -> None:
    params = _model.ModelParams.create(1, (0.9, 0.9, 0.9, 1))
    options = bvp_solver.SolveOptions()

    same = serializers.config_hash(
        _model.ModelParams.create(1, (0.9, 0.9, 0.9, 1)),
        bvp_solver.SolveOptions(),
    )
    other_mesh = serializers.config_hash(
        params, bvp_solver.SolveOptions(mesh_size=200)
    )
    other_rank = serializers.config_hash(
        _model.ModelParams.create(2, (0.9, 0.9, 0.9, 1)), options
    )

    assert serializers.config_hash(params, options) == same
    assert len({same, other_mesh, other_rank}) == 3


def test_check_manifest_accepts_a_matching_run() -> None:
    params = _model.ModelParams.create(1, (0.9, 0.9, 0.9, 1))
    options = bvp_solver.SolveOptions()
    manifest = serializers.make_manifest(params, options)

    serializers.check_manifest(manifest, params, options)


def test_check_manifest_rejects_a_different_run() -> None:
    params = _model.ModelParams.create(1, (0.9, 0.9, 0.9, 1))
    options = bvp_solver.SolveOptions()
    manifest = serializers.make_manifest(params, options)
    other = _model.ModelParams.create(2, (0.9, 0.9, 0.9, 1))

    with pytest.raises(errors.ManifestMismatchError):
        serializers.check_manifest(manifest, other, options)


def test_check_manifest_can_be_forced(
    caplog: pytest.LogCaptureFixture,
) -> None:
    params = _model.ModelParams.create(1, (0.9, 0.9, 0.9, 1))
    manifest = serializers.make_manifest(params, bvp_solver.SolveOptions())

    with caplog.at_level(logging.WARNING):
        serializers.check_manifest(
            manifest,
            params,
            bvp_solver.SolveOptions(mesh_size=200),
            force=True,
        )

    assert "--force" in caplog.text


def test_check_manifest_only_warns_about_versions(
    caplog: pytest.LogCaptureFixture,
) -> None:
    params = _model.ModelParams.create(1, (1, 1, 1, 1))
    options = bvp_solver.SolveOptions()
    manifest = serializers.make_manifest(params, options).model_copy(
        update={"version": "0.0.1"}
    )

    with caplog.at_level(logging.WARNING):
        serializers.check_manifest(manifest, params, options)

    assert "0.0.1" in caplog.text


@pytest.mark.parametrize(
    "content",
    [
        pytest.param("{not json", id="malformed"),
        pytest.param("[1, 2]", id="array"),
        pytest.param('{"format": "other/1"}', id="wrong-format"),
        pytest.param(
            json.dumps({"format": serializers.RESULT_FORMAT}),
            id="missing-keys",
        ),
    ],
)
def test_load_result_rejects_foreign_files(
    tmp_path: pathlib.Path, content: str
) -> None:
    path = tmp_path / "result.json"
    path.write_text(content, encoding="utf-8")

    with pytest.raises(errors.ArtifactFormatError):
        serializers.load_result(path)


def test_result_from_dict_checks_profile_shapes(
    round_result: bvp_solver.SolveResult,
) -> None:
    data = serializers.result_to_dict(round_result)
    data["dy"] = data["dy"][:1]

    with pytest.raises(errors.ArtifactFormatError, match="shapes"):
        serializers.result_from_dict(data)


def test_artifact_errors_are_os_errors() -> None:
    assert issubclass(errors.ArtifactFormatError, OSError)
    assert issubclass(errors.ArtifactFormatError, errors.FillingsError)


def test_csv_columns() -> None:
    assert serializers.CSV_COLUMNS[:5] == ("x", "y1", "y2", "y3", "y4")
    assert serializers.CSV_COLUMNS[-2:] == ("res_extra_28", "res_extra_212")
    assert len(serializers.CSV_COLUMNS) == 19


def test_profile_rows_leave_endpoint_residuals_blank(
    round_result: bvp_solver.SolveResult,
) -> None:
    rows = serializers.profile_rows(round_result)

    assert len(rows) == len(round_result.grid.x)
    assert tuple(rows[0]) == serializers.CSV_COLUMNS
    for row in (rows[0], rows[-1]):
        assert row["res_extra_28"] == ""
        assert row["res_extra_212"] == ""
    assert abs(float(rows[1]["res_extra_212"])) <= 1e-12
    assert float(rows[10]["K"]) == 1.0
    assert rows[-1]["x"] == "1.0"


def test_write_csv_uses_the_fixed_header(
    tmp_path: pathlib.Path, u1_result: bvp_solver.SolveResult
) -> None:
    path = serializers.write_csv(
        tmp_path / "profile.csv", serializers.profile_rows(u1_result)
    )

    with path.open(encoding="utf-8", newline="") as file:
        reader = csv.reader(file)
        header = next(reader)
        rows = list(reader)

    assert tuple(header) == serializers.CSV_COLUMNS
    assert len(rows) == len(u1_result.grid.x)
    assert rows[0][3] == rows[0][4]


def test_write_csv_blanks_missing_keys(tmp_path: pathlib.Path) -> None:
    path = serializers.write_csv(
        tmp_path / "steps.csv", [{"t": "0.5"}], ("t", "K0")
    )

    assert path.read_text(encoding="utf-8").splitlines() == ["t,K0", "0.5,"]


def test_node_extra_residuals_of_the_hyperbolic_solution(
    round_result: bvp_solver.SolveResult,
) -> None:
    extra = serializers.node_extra_residuals(round_result)

    assert extra.shape == (2, len(round_result.grid.x))
    assert np.all(np.isnan(extra[:, [0, -1]]))
    np.testing.assert_allclose(extra[:, 1:-1], 0, atol=1e-12)


def test_expansions_to_dict(sp1_result: bvp_solver.SolveResult) -> None:
    params = sp1_result.params

    data = serializers.expansions_to_dict(sp1_result)

    origin, center = data["origin"], data["center"]
    assert origin["variable"] == "x"
    assert origin["order"] == params.n + 1
    assert origin["free"] == ["log_K0", "c_1_2", "c_2_7"]
    assert len(origin["coefficients"]) == params.m
    assert float(origin["K0"]) == pytest.approx(sp1_result.K0)
    assert float(origin["curvature"]) == sp1_result.origin_params[1]
    assert center["variable"] == "1-x"
    assert center["order"] == sp1_result.options.center_order
    assert [float(v) for v in center["values"]] == list(
        sp1_result.center_params
    )
    json.dumps(data)
