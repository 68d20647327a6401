# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Run configuration and its text file format.

A configuration file consists of ``key = value`` lines grouped into the
sections ``[model]``, ``[solver]``, ``[continuation]``, ``[output]``,
``[verify]`` and ``[sweep]``. Lists are comma separated::

    [model]
    k = 1
    lambda = 0.9, 0.9, 0.9, 1

    [solver]
    mesh_size = 400
    tol = 1e-10

Unknown sections or keys are rejected.
"""

from __future__ import annotations

import collections.abc as cabc
import configparser
import logging
import os
import pathlib
import typing as t

import pydantic

from . import errors
from . import model as _model
from .bvp_solver import ContinuationOptions, SolveOptions

__all__ = [
    "SECTIONS",
    "ModelSection",
    "OutputSection",
    "RunConfig",
    "SweepSection",
    "VerifySection",
    "load_config",
]

logger = logging.getLogger(__name__)

SECTIONS = ("model", "solver", "continuation", "output", "verify", "sweep")


def _split(value: t.Any) -> t.Any:
    if isinstance(value, str):
        return tuple(part.strip() for part in value.split(",") if part.strip())
    return value


class ModelSection(pydantic.BaseModel):
    """Problem definition."""

    model_config = pydantic.ConfigDict(
        frozen=True, extra="forbid", populate_by_name=True
    )

    k: int = pydantic.Field(default=1, ge=1)
    lambda_: tuple[float, float, float, float] = pydantic.Field(
        default=(1.0, 1.0, 1.0, 1.0), alias="lambda"
    )
    symmetry: t.Literal["auto", "full", "sp1", "u1"] = pydantic.Field(
        default="auto", alias="class"
    )

    @pydantic.field_validator("lambda_", mode="before")
    @classmethod
    def _split_lambda(cls, value: t.Any) -> t.Any:
        return _split(value)


class OutputSection(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    out: pathlib.Path = pathlib.Path()
    """Directory that receives the artifacts."""
    format: t.Literal["json", "csv", "both"] = "both"
    expansions: bool = False
    """Also write the endpoint expansions of the final solution."""


class VerifySection(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    seed: int = 0
    """Seed of the perturbations of the uniqueness probe."""
    perturbations: int = pydantic.Field(default=0, ge=0)
    """Number of perturbed restarts; 0 disables the probe."""
    shooting: bool = False
    """Compare with the shooting oracle."""
    match_point: float = pydantic.Field(default=0.5, gt=0.2, lt=0.8)
    decay_start: float = pydantic.Field(default=0.5, gt=0, lt=1)
    force: bool = False
    """Verify artifacts whose manifest does not match the configuration."""


class SweepSection(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    grid: tuple[float, ...] = ()
    """Values taken by each of λ₁..λ₃; λ₄ comes from the model."""
    workers: int | None = pydantic.Field(default=None, ge=1)
    """Size of the worker pool; the CPU count by default."""

    @pydantic.field_validator("grid", mode="before")
    @classmethod
    def _split_grid(cls, value: t.Any) -> t.Any:
        return _split(value)

    @property
    def pool_size(self) -> int:
        return self.workers or os.cpu_count() or 1


class RunConfig(pydantic.BaseModel):
    """Complete configuration of a command line run."""

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    model: ModelSection = ModelSection()
    solver: SolveOptions = SolveOptions()
    continuation: ContinuationOptions = ContinuationOptions()
    output: OutputSection = OutputSection()
    verify: VerifySection = VerifySection()
    sweep: SweepSection = SweepSection()

    def params(self) -> _model.ModelParams:
        """Build and validate the problem parameters.

        Raises
        ------
        InvalidParameterError
            If the model section does not describe a valid problem.
        """
        return _model.ModelParams.create(
            self.model.k, self.model.lambda_, self.model.symmetry
        )

    def with_overrides(
        self, overrides: cabc.Mapping[str, cabc.Mapping[str, t.Any]]
    ) -> RunConfig:
        """Return a copy with section values replaced.

        ``overrides`` maps section names to the keys to replace, spelled
        as in the configuration file; ``None`` values are ignored.

        Raises
        ------
        InvalidParameterError
            If the result is not a valid configuration.
        """
        data = self.model_dump(by_alias=True)
        for section, values in overrides.items():
            data[section].update(
                {k: v for k, v in values.items() if v is not None}
            )
        return _validate(data)


def _validate(data: cabc.Mapping[str, t.Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except pydantic.ValidationError as err:
        raise errors.InvalidParameterError(
            f"Invalid configuration: {err}"
        ) from err


def load_config(path: str | os.PathLike[str]) -> RunConfig:
    """Read a configuration file.

    Raises
    ------
    InvalidParameterError
        If the file contains unknown sections or invalid values.
    OSError
        If the file cannot be read.
    """
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    with open(path, encoding="utf-8") as file:
        try:
            parser.read_file(file)
        except configparser.Error as err:
            raise errors.InvalidParameterError(
                f"Malformed configuration file {path}: {err}"
            ) from err
    unknown = set(parser.sections()) - set(SECTIONS)
    if unknown:
        raise errors.InvalidParameterError(
            f"Unknown configuration sections: {', '.join(sorted(unknown))}"
        )
    data = {
        section: dict(parser[section])
        for section in SECTIONS
        if parser.has_section(section)
    }
    logger.debug("Loaded configuration from %s: %s", path, data)
    return _validate(data)
