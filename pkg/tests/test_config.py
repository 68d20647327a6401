# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import pathlib
import textwrap

import pytest

from sp_einstein_fillings import config, errors
from sp_einstein_fillings import model as _model


def _write(tmp_path: pathlib.Path, text: str) -> pathlib.Path:
    path = tmp_path / "run.ini"
    path.write_text(textwrap.dedent(text), encoding="utf-8")
    return path


def test_default_configuration() -> None:
    cfg = config.RunConfig()

    assert cfg.model.lambda_ == (1.0, 1.0, 1.0, 1.0)
    assert cfg.model.symmetry == "auto"
    assert cfg.solver.mesh_size == 400
    assert cfg.continuation.steps == 8
    assert cfg.output.format == "both"
    assert cfg.verify.perturbations == 0
    assert cfg.sweep.grid == ()


def test_load_config_reads_every_section(tmp_path: pathlib.Path) -> None:
    path = _write(
        tmp_path,
        """\
        [model]
        k = 2
        lambda = 0.9, 0.95, 1.0, 1
        class = auto

        [solver]
        mesh_size = 200  # coarse
        tol = 1e-9

        [continuation]
        steps = 4
        secant_predictor = yes

        [output]
        out = results
        format = json

        [verify]
        perturbations = 3
        seed = 11

        [sweep]
        grid = 0.9, 1.0
        workers = 2
        """,
    )

    cfg = config.load_config(path)

    assert cfg.model.k == 2
    assert cfg.model.lambda_ == (0.9, 0.95, 1.0, 1.0)
    assert cfg.solver.mesh_size == 200
    assert cfg.solver.tol == 1e-9
    assert cfg.continuation.steps == 4
    assert cfg.continuation.secant_predictor
    assert cfg.output.out == pathlib.Path("results")
    assert cfg.output.format == "json"
    assert cfg.verify.perturbations == 3
    assert cfg.verify.seed == 11
    assert cfg.sweep.grid == (0.9, 1.0)
    assert cfg.sweep.pool_size == 2


def test_params_from_the_model_section(tmp_path: pathlib.Path) -> None:
    path = _write(
        tmp_path,
        """\
        [model]
        k = 2
        lambda = 1.1, 0.95, 0.95, 1
        """,
    )

    params = config.load_config(path).params()

    assert params.n == 11
    assert params.symmetry is _model.SymmetryClass.U1


@pytest.mark.parametrize(
    "text",
    [
        pytest.param("[plot]\nwidth = 3\n", id="unknown-section"),
        pytest.param("[solver]\nrelax = 1\n", id="unknown-key"),
        pytest.param("k = 1\n", id="no-section"),
        pytest.param("[model]\nk = 0\n", id="zero-rank"),
        pytest.param("[model]\nlambda = 1, 1, 1\n", id="short-lambda"),
        pytest.param("[model]\nclass = so3\n", id="unknown-class"),
        pytest.param("[verify]\nmatch_point = 0.9\n", id="match-point"),
    ],
)
def test_load_config_rejects_invalid_files(
    tmp_path: pathlib.Path, text: str
) -> None:
    path = _write(tmp_path, text)

    with pytest.raises(errors.InvalidParameterError):
        config.load_config(path)


def test_inconsistent_class_is_rejected_when_building_params(
    tmp_path: pathlib.Path,
) -> None:
    path = _write(
        tmp_path,
        """\
        [model]
        lambda = 1.1, 1.05, 0.95, 1
        class = sp1
        """,
    )
    cfg = config.load_config(path)

    with pytest.raises(errors.InvalidParameterError):
        cfg.params()


def test_load_config_of_a_missing_file(tmp_path: pathlib.Path) -> None:
    with pytest.raises(OSError):  # noqa: PT011
        config.load_config(tmp_path / "missing.ini")


def test_with_overrides_replaces_given_values() -> None:
    cfg = config.RunConfig()

    new = cfg.with_overrides(
        {
            "model": {"lambda": "0.9,1,1,1", "class": None},
            "solver": {"mesh_size": 100, "tol": None},
        }
    )

    assert new.model.lambda_ == (0.9, 1.0, 1.0, 1.0)
    assert new.model.symmetry == "auto"
    assert new.solver.mesh_size == 100
    assert new.solver.tol == cfg.solver.tol
    assert cfg.solver.mesh_size == 400


def test_with_overrides_validates_the_result() -> None:
    with pytest.raises(errors.InvalidParameterError):
        config.RunConfig().with_overrides({"solver": {"mesh_size": 8}})
