# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Options of the collocation solver and of the continuation driver."""

from __future__ import annotations

import pydantic

__all__ = ["ContinuationOptions", "SolveOptions"]


class SolveOptions(pydantic.BaseModel):
    """Options of a single Newton–collocation solve."""

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    tol: float = pydantic.Field(default=1e-10, gt=0)
    """Target sup-norm of the discrete residual."""
    max_iter: int = pydantic.Field(default=50, ge=1)
    """Maximal number of Newton iterations."""
    armijo_sigma: float = pydantic.Field(default=1e-4, gt=0, lt=1)
    """Sufficient-decrease constant of the backtracking line search."""
    max_backtracks: int = pydantic.Field(default=30, ge=0)
    """Maximal number of step halvings per Newton iteration."""
    mesh_size: int = pydantic.Field(default=400, ge=16)
    """Number of mesh intervals ``N``."""
    grading: float = pydantic.Field(default=2.0, ge=1)
    """Endpoint clustering exponent of the mesh."""
    series_trust: float = pydantic.Field(default=0.05, gt=0, le=0.1)
    """Width of the endpoint caps covered by the series."""
    cap_reference: int | None = pydantic.Field(default=100, ge=16)
    """Mesh size beyond which the caps shrink with the mesh spacing;
    ``None`` keeps them ``series_trust`` wide."""
    origin_order: int | None = None
    """Truncation order at ``x = 0``; ``None`` selects ``n+1``."""
    center_order: int = pydantic.Field(default=6, ge=3)
    """Truncation order at ``x = 1``."""


class ContinuationOptions(pydantic.BaseModel):
    """Options of the continuation driver."""

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    steps: int = pydantic.Field(default=8, ge=1)
    """Number of equal steps in the family parameter."""
    max_halvings: int = pydantic.Field(default=12, ge=0)
    """Maximal number of consecutive step halvings."""
    secant_predictor: bool = False
    """Extrapolate the initial guess from the last two solutions."""
