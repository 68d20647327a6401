# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Errors for sp_einstein_fillings."""

from __future__ import annotations

import collections.abc as cabc
import typing as t

if t.TYPE_CHECKING:
    from .bvp_solver.continuation import ContinuationPath


class FillingsError(Exception):
    """Error raised by sp_einstein_fillings."""


class InvalidParameterError(FillingsError, ValueError):
    """A model parameter, option or configuration value is invalid."""


class DomainError(FillingsError, ValueError):
    """An evaluation point lies outside the admissible domain."""


class BranchViolationError(FillingsError, ArithmeticError):
    """The state left the regime where the selected root branch exists."""


class UnsupportedOrderError(FillingsError, ValueError):
    """A series truncation order is outside the supported range."""


class DegenerateIndexError(FillingsError, ArithmeticError):
    """A series recursion hit a vanishing indicial factor."""

    def __init__(self, order: int, equation: int) -> None:
        super().__init__(
            f"Indicial factor vanishes at order {order} of equation"
            f" {equation}"
        )
        self.order = order
        self.equation = equation


class InsufficientResolutionError(FillingsError):
    """The mesh is too coarse for the requested local fit."""


class PositivityLossError(FillingsError, ArithmeticError):
    """A metric coefficient stopped being positive and finite."""

    def __init__(self, message: str, node: int | None = None) -> None:
        super().__init__(message)
        self.node = node


class NonConvergenceError(FillingsError):
    """An iterative solve did not reach its tolerance."""

    def __init__(
        self, message: str, history: cabc.Sequence[float] = ()
    ) -> None:
        super().__init__(message)
        self.history = list(history)


class SingularJacobianError(FillingsError, ArithmeticError):
    """The Newton matrix is singular to working precision."""

    def __init__(self, node: int, pivot: int) -> None:
        super().__init__(
            f"Singular Jacobian: zero pivot {pivot} (mesh node {node})"
        )
        self.node = node
        self.pivot = pivot


class StepCollapseError(FillingsError):
    """Continuation step halving reached its limit without convergence."""

    def __init__(
        self,
        last_good_t: float,
        path: ContinuationPath | None = None,
    ) -> None:
        super().__init__(
            f"Continuation step collapsed; last good parameter t={last_good_t}"
        )
        self.last_good_t = last_good_t
        self.path = path


class InvalidClassError(FillingsError, ValueError):
    """The operation is not defined for this symmetry class."""


class InvalidComparisonError(FillingsError, ValueError):
    """Two results cannot be compared."""


class ManifestMismatchError(FillingsError):
    """A stored run manifest does not match the current run."""


class ArtifactFormatError(FillingsError, OSError):
    """An artifact file is malformed or of an unknown format."""
