# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Serialize solutions and reports into JSON and CSV artifacts.

JSON artifacts hold every float as its shortest round-trip decimal
representation, so that
[load_result][sp_einstein_fillings.serializers.load_result] restores a
[SolveResult][sp_einstein_fillings.bvp_solver.SolveResult] with
bitwise-identical arrays. Every result artifact embeds a
[RunManifest][sp_einstein_fillings.serializers.RunManifest].

CSV profiles have one row per mesh node and the fixed columns of
[CSV_COLUMNS][sp_einstein_fillings.serializers.CSV_COLUMNS]. Profiles
are replicated to four unknowns and labelled in the original λ order.
"""

from __future__ import annotations

import collections.abc as cabc
import csv
import hashlib
import json
import logging
import os
import pathlib
import typing as t

import numpy as np
import numpy.typing as npt
import pydantic

from . import __version__, errors, ode_system
from . import model as _model
from .bvp_solver import SolutionGrid, SolveOptions, SolveResult
from .endpoint_series import expand_center, expand_origin

__all__ = [
    "CSV_COLUMNS",
    "RESULT_FORMAT",
    "RunManifest",
    "check_manifest",
    "config_hash",
    "dump_result",
    "expansions_to_dict",
    "load_result",
    "make_manifest",
    "node_extra_residuals",
    "profile_rows",
    "result_from_dict",
    "result_to_dict",
    "write_csv",
    "write_json",
]

logger = logging.getLogger(__name__)

RESULT_FORMAT = "sp-einstein-fillings/result/1"
"""Format tag of result artifacts."""
CSV_COLUMNS = (
    "x",
    *(f"y{j}" for j in range(1, 5)),
    *(f"dy{j}" for j in range(1, 5)),
    "K",
    *(f"t{i}" for i in range(1, 4)),
    *(f"I{i}" for i in range(1, 5)),
    "res_extra_28",
    "res_extra_212",
)
"""Column order of CSV profiles."""


class RunManifest(pydantic.BaseModel):
    """Provenance of an artifact."""

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    config_hash: str
    """SHA-256 of the canonical JSON of the parameters and options."""
    version: str
    """Version of the package that wrote the artifact."""
    options: dict[str, t.Any]


def _canonical(payload: t.Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def config_hash(params: _model.ModelParams, options: SolveOptions) -> str:
    """Return the fingerprint of a problem and its solver options."""
    payload = {
        "params": params.model_dump(mode="json", by_alias=True),
        "options": options.model_dump(mode="json"),
    }
    return hashlib.sha256(_canonical(payload).encode("utf-8")).hexdigest()


def make_manifest(
    params: _model.ModelParams, options: SolveOptions
) -> RunManifest:
    return RunManifest(
        config_hash=config_hash(params, options),
        version=__version__,
        options=options.model_dump(mode="json"),
    )


def check_manifest(
    manifest: RunManifest,
    params: _model.ModelParams,
    options: SolveOptions,
    *,
    force: bool = False,
) -> None:
    """Compare a stored manifest with the current parameters and options.

    A different package version is only logged.

    Raises
    ------
    ManifestMismatchError
        If the configuration fingerprints differ and ``force`` is not
        set.
    """
    if manifest.version != __version__:
        logger.warning(
            "Artifact was written by version %s, running %s",
            manifest.version,
            __version__,
        )
    expected = config_hash(params, options)
    if manifest.config_hash == expected:
        return
    message = (
        f"Manifest fingerprint {manifest.config_hash[:12]} does not match"
        f" the configuration ({expected[:12]})"
    )
    if not force:
        raise errors.ManifestMismatchError(message)
    logger.warning("%s; continuing because of --force", message)


def _floats(values: npt.ArrayLike) -> list[t.Any]:
    return np.asarray(values, dtype=np.float64).tolist()


def result_to_dict(result: SolveResult) -> dict[str, t.Any]:
    """Convert a result into a JSON-compatible mapping."""
    grid = result.grid
    params = result.params
    y, _, _ = grid.labelled()
    fields = ode_system.derived_fields(y, params.n, _model.SymmetryClass.FULL)
    return {
        "format": RESULT_FORMAT,
        "manifest": make_manifest(params, result.options).model_dump(),
        "params": params.model_dump(mode="json", by_alias=True),
        "options": result.options.model_dump(mode="json"),
        "K0": result.K0,
        "residual_solved": result.residual_solved,
        "residual_extra": list(result.residual_extra),
        "iterations": result.iterations,
        "history": list(result.history),
        "origin_params": list(result.origin_params),
        "center_params": list(result.center_params),
        "window": list(result.window),
        "nodes": _floats(grid.x),
        "y": _floats(grid.y),
        "dy": _floats(grid.dy),
        "ddy": _floats(grid.ddy),
        "derived": {
            "K": _floats(fields.K),
            "t": _floats(fields.t),
            "I": _floats(fields.I),
        },
    }


def result_from_dict(
    data: cabc.Mapping[str, t.Any],
) -> tuple[SolveResult, RunManifest]:
    """Rebuild a result and its manifest from a mapping.

    Derived fields stored alongside the profiles are ignored.

    Raises
    ------
    ArtifactFormatError
        If the mapping is not a result artifact.
    """
    if data.get("format") != RESULT_FORMAT:
        raise errors.ArtifactFormatError(
            f"Not a result artifact: format={data.get('format')!r}"
        )
    try:
        params = _model.ModelParams.model_validate(data["params"])
        options = SolveOptions.model_validate(data["options"])
        manifest = RunManifest.model_validate(data["manifest"])
        grid = SolutionGrid(
            params=params,
            x=np.asarray(data["nodes"], dtype=np.float64),
            y=np.asarray(data["y"], dtype=np.float64),
            dy=np.asarray(data["dy"], dtype=np.float64),
            ddy=np.asarray(data["ddy"], dtype=np.float64),
        )
        shapes = {grid.y.shape, grid.dy.shape, grid.ddy.shape}
        if shapes != {(params.m, len(grid.x))}:
            raise ValueError(f"Inconsistent profile shapes: {shapes}")
        extra = data["residual_extra"]
        result = SolveResult(
            grid=grid,
            K0=float(data["K0"]),
            residual_solved=float(data["residual_solved"]),
            residual_extra=(float(extra[0]), float(extra[1])),
            iterations=int(data["iterations"]),
            history=tuple(float(v) for v in data["history"]),
            origin_params=tuple(float(v) for v in data["origin_params"]),
            center_params=tuple(float(v) for v in data["center_params"]),
            options=options,
            window=(int(data["window"][0]), int(data["window"][1])),
        )
    except (KeyError, IndexError, TypeError, ValueError) as err:
        raise errors.ArtifactFormatError(
            f"Malformed result artifact: {err}"
        ) from err
    return result, manifest


def write_json(
    path: str | os.PathLike[str], payload: cabc.Mapping[str, t.Any]
) -> pathlib.Path:
    """Write ``payload`` atomically as indented JSON."""
    target = pathlib.Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_suffix(target.suffix + ".tmp")
    tmp.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    tmp.replace(target)
    logger.debug("Wrote %s", target)
    return target


def dump_result(
    result: SolveResult, path: str | os.PathLike[str]
) -> pathlib.Path:
    return write_json(path, result_to_dict(result))


def load_result(
    path: str | os.PathLike[str],
) -> tuple[SolveResult, RunManifest]:
    """Read a result artifact.

    Raises
    ------
    ArtifactFormatError
        If the file is not valid JSON or not a result artifact.
    OSError
        If the file cannot be read.
    """
    text = pathlib.Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise errors.ArtifactFormatError(f"{path}: {err}") from err
    if not isinstance(data, dict):
        raise errors.ArtifactFormatError(f"{path}: not a JSON object")
    return result_from_dict(data)


def node_extra_residuals(result: SolveResult) -> npt.NDArray[np.float64]:
    """Return the two extra residuals at every node, NaN at the endpoints."""
    grid = result.grid
    out = np.full((2, len(grid.x)), np.nan)
    interior = (grid.x > 0) & (grid.x < 1)
    out[:, interior] = ode_system.evaluate(
        grid.x[interior],
        grid.y[:, interior],
        grid.dy[:, interior],
        grid.ddy[:, interior],
        result.params.n,
        result.params.symmetry,
    ).r_extra
    return out


def profile_rows(result: SolveResult) -> list[dict[str, str]]:
    """Return the CSV rows of a result, formatted as decimal strings."""
    grid = result.grid
    y, dy, _ = grid.labelled()
    fields = ode_system.derived_fields(
        y, result.params.n, _model.SymmetryClass.FULL
    )
    extra = node_extra_residuals(result)
    columns = np.concatenate(
        [grid.x[np.newaxis], y, dy, fields.K[np.newaxis], fields.t, fields.I]
    )
    rows = []
    for j in range(len(grid.x)):
        values = [repr(float(v)) for v in columns[:, j]]
        values += ["" if np.isnan(v) else repr(float(v)) for v in extra[:, j]]
        rows.append(dict(zip(CSV_COLUMNS, values, strict=True)))
    return rows


def write_csv(
    path: str | os.PathLike[str],
    rows: cabc.Iterable[cabc.Mapping[str, t.Any]],
    fieldnames: cabc.Sequence[str] = CSV_COLUMNS,
) -> pathlib.Path:
    """Write rows under a fixed header; missing keys become blank."""
    target = pathlib.Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="", encoding="utf-8") as file:
        writer = csv.DictWriter(file, fieldnames=list(fieldnames))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in fieldnames})
    logger.debug("Wrote %s", target)
    return target


def _coefficients(coeff: npt.NDArray[np.float64]) -> list[list[str]]:
    return [[repr(float(v)) for v in row] for row in coeff]


def expansions_to_dict(result: SolveResult) -> dict[str, t.Any]:
    """Rebuild both endpoint expansions of a result for export.

    Coefficients are written as decimal strings, one row per unknown
    in canonical order.
    """
    params = result.params
    options = result.options
    log_k0, curvature, *nonlocal_ = result.origin_params
    origin = expand_origin(
        params.boundary_data(),
        float(np.exp(log_k0)),
        nonlocal_,
        options.origin_order,
        params,
        curvature=curvature,
    )
    center = expand_center(result.center_params, options.center_order, params)
    return {
        "params": params.model_dump(mode="json", by_alias=True),
        "origin": {
            "variable": "x",
            "order": origin.order,
            "free": list(origin.free),
            "K0": repr(origin.K0),
            "curvature": repr(origin.curvature),
            "nonlocal": [repr(v) for v in origin.nonlocal_],
            "coefficients": _coefficients(origin.coeff),
        },
        "center": {
            "variable": "1-x",
            "order": center.order,
            "free": list(center.free),
            "values": [repr(v) for v in center.values],
            "coefficients": _coefficients(center.coeff),
        },
    }
