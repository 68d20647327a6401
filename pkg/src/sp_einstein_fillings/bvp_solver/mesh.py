# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Graded meshes on ``[0, 1]``."""

from __future__ import annotations

import dataclasses

import numpy as np
import numpy.typing as npt

from .. import errors

__all__ = [
    "MIN_MESH_SIZE",
    "Mesh",
    "build_mesh",
    "cap_width",
    "collocation_window",
]

MIN_MESH_SIZE = 16


@dataclasses.dataclass(frozen=True)
class Mesh:
    """Strictly increasing nodes with exact endpoints 0 and 1."""

    nodes: npt.NDArray[np.float64]
    grading: float

    @property
    def size(self) -> int:
        """Number of intervals."""
        return len(self.nodes) - 1


def build_mesh(N: int, grading: float) -> Mesh:
    """Map a uniform grid ``ξ_i = i/N`` through ``ξ^g / (ξ^g + (1−ξ)^g)``.

    The map is symmetric about ``1/2``; ``g = 1`` gives a uniform mesh and
    ``g = 2`` spacings of order ``N⁻²`` at both endpoints.
    """
    if N < MIN_MESH_SIZE:
        raise errors.InvalidParameterError(
            f"Mesh needs at least {MIN_MESH_SIZE} intervals, got {N}"
        )
    if grading < 1:
        raise errors.InvalidParameterError(
            f"Grading must be at least 1, got {grading}"
        )
    xi = np.arange(N + 1) / N
    left = xi**grading
    nodes = left / (left + (1 - xi) ** grading)
    nodes[0], nodes[-1] = 0.0, 1.0
    return Mesh(nodes=nodes, grading=float(grading))


def cap_width(trust: float, size: int, reference: int | None) -> float:
    """Return the width of the series caps on a mesh of ``size`` intervals.

    Up to ``reference`` intervals the caps are ``trust`` wide; on finer
    meshes they shrink like the mesh spacing, so that the truncation
    error of the series closure falls faster than the collocation error.
    ``reference=None`` keeps them at ``trust``.
    """
    if reference is None or size <= reference:
        return trust
    return trust * reference / size


def collocation_window(
    nodes: npt.NDArray[np.float64], trust: float
) -> tuple[int, int]:
    """Return the indices of the outermost nodes inside the series caps.

    The left index is the last interior node with ``x <= trust``, the
    right index the first interior node with ``x >= 1 − trust``.

    Raises
    ------
    InsufficientResolutionError
        If a cap contains no interior node.
    """
    inner = np.flatnonzero((nodes > 0) & (nodes <= trust))
    outer = np.flatnonzero((nodes < 1) & (nodes >= 1 - trust))
    if not len(inner) or not len(outer):
        raise errors.InsufficientResolutionError(
            f"No interior mesh node within {trust} of an endpoint; refine"
            " the mesh or raise the grading"
        )
    left, right = int(inner[-1]), int(outer[0])
    if right - left < 2:
        raise errors.InsufficientResolutionError(
            "Collocation window holds fewer than two intervals"
        )
    return left, right
