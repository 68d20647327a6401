# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Solution profiles sampled on a mesh."""

from __future__ import annotations

import dataclasses
import logging

import numpy as np
import numpy.typing as npt
from scipy import interpolate

from .. import model as _model
from .. import ode_system
from .mesh import Mesh

__all__ = ["SolutionGrid"]

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class SolutionGrid:
    """Values and derivatives of the unknowns at every mesh node."""

    params: _model.ModelParams
    x: npt.NDArray[np.float64]
    """Mesh nodes including both endpoints."""
    y: npt.NDArray[np.float64]
    """Log-variables, shape ``(m, N+1)``."""
    dy: npt.NDArray[np.float64]
    ddy: npt.NDArray[np.float64]

    @classmethod
    def zeros(cls, params: _model.ModelParams, mesh: Mesh) -> SolutionGrid:
        """Return the hyperbolic state ``y ≡ 0``."""
        shape = (params.m, len(mesh.nodes))
        return cls(
            params=params,
            x=mesh.nodes.copy(),
            y=np.zeros(shape),
            dy=np.zeros(shape),
            ddy=np.zeros(shape),
        )

    @classmethod
    def blend(cls, params: _model.ModelParams, mesh: Mesh) -> SolutionGrid:
        """Return ``y_{i+1} = log t_i(0)·(1−x²)²`` and ``y₁ ≡ 0``.

        The profile meets the boundary values and has vanishing slopes
        at both endpoints.
        """
        x = mesh.nodes.copy()
        logs = np.zeros(params.m)
        logs[1:] = np.log(params.boundary_data().t0[: params.m - 1])
        c = logs[:, np.newaxis]
        a = 1 - x * x
        return cls(
            params=params,
            x=x,
            y=c * a * a,
            dy=-4 * c * x * a,
            ddy=c * (12 * x * x - 4),
        )

    @property
    def m(self) -> int:
        return self.y.shape[0]

    @property
    def K0(self) -> float:
        return float(np.exp(self.y[0, 0]))

    def fields(self) -> ode_system.DerivedFields:
        """Return ``K``, ``t``, ``I``, Ψ and Υ at every node."""
        return ode_system.derived_fields(
            self.y, self.params.n, self.params.symmetry, self.dy
        )

    def replicated(
        self,
    ) -> tuple[
        npt.NDArray[np.float64],
        npt.NDArray[np.float64],
        npt.NDArray[np.float64],
    ]:
        """Return ``y``, ``y'`` and ``y''`` expanded to four components."""
        sym = self.params.symmetry
        return (
            ode_system.replicate(self.y, sym),
            ode_system.replicate(self.dy, sym),
            ode_system.replicate(self.ddy, sym),
        )

    def labelled(
        self,
    ) -> tuple[
        npt.NDArray[np.float64],
        npt.NDArray[np.float64],
        npt.NDArray[np.float64],
    ]:
        """Return the replicated profiles in the original λ order.

        Row 0 is ``y₁ = log K``; row ``i`` is ``log t_i`` with ``t_i``
        belonging to ``λ_i``.
        """
        out = []
        for values in self.replicated():
            labelled = values.copy()
            for slot, source in enumerate(self.params.permutation):
                labelled[1 + source] = values[1 + slot]
            out.append(labelled)
        y, dy, ddy = out
        return y, dy, ddy

    def spline(self) -> interpolate.CubicHermiteSpline:
        """Return the piecewise cubic Hermite interpolant of ``y``."""
        return interpolate.CubicHermiteSpline(self.x, self.y, self.dy, axis=1)

    def interpolate(
        self, x: npt.ArrayLike
    ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """Return ``y`` and ``y'`` at arbitrary abscissae."""
        spline = self.spline()
        return spline(x), spline.derivative()(x)

    def resample(self, mesh: Mesh) -> SolutionGrid:
        """Interpolate onto another mesh.

        Second derivatives are taken from a Hermite interpolant of the
        first derivatives.
        """
        y, dy = self.interpolate(mesh.nodes)
        dspline = interpolate.CubicHermiteSpline(
            self.x, self.dy, self.ddy, axis=1
        )
        return dataclasses.replace(
            self, x=mesh.nodes.copy(), y=y, dy=dy, ddy=dspline(mesh.nodes)
        )

    def with_params(self, params: _model.ModelParams) -> SolutionGrid:
        return dataclasses.replace(self, params=params)
