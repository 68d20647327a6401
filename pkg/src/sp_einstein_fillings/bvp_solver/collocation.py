# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Lobatto IIIA collocation of the solved set with series closure.

The second-order system is rewritten for ``z = (y, v)`` with ``v = y'``
and discretized by the three-stage Lobatto IIIA scheme (Hermite–Simpson,
formal order 4) on the mesh nodes between ``x_L`` and ``x_R``, the
outermost nodes inside the series caps. ``z(x_L)`` is tied to the
expansion at ``x = 0`` and ``z(x_R)`` to the expansion at ``x = 1``; the
free data of both expansions are unknowns. With the ordering
``[origin data, z_L, ..., z_R, center data]`` the Newton matrix is square
with lower bandwidth ``3m−2`` and upper bandwidth ``3m``.
"""

from __future__ import annotations

import collections.abc as cabc
import logging
import typing as t

import numpy as np
import numpy.typing as npt
from scipy import linalg

from .. import endpoint_series, errors, ode_system
from .. import model as _model
from .grid import SolutionGrid
from .mesh import Mesh, cap_width, collocation_window
from .options import SolveOptions

__all__ = [
    "BandedMatrix",
    "CollocationProblem",
    "assemble",
    "solve_banded",
]

logger = logging.getLogger(__name__)

Array: t.TypeAlias = npt.NDArray[np.float64]

LOG_LIMIT = 700.0
"""Largest admissible ``|y|`` before ``exp`` overflows."""
FD_STEP = 6e-6
"""Relative step of the central differences in the series data."""


class BandedMatrix(t.NamedTuple):
    """Matrix in LAPACK band storage, ``ab[upper + i − j, j] = A[i, j]``."""

    ab: Array
    lower: int
    upper: int

    @property
    def size(self) -> int:
        return self.ab.shape[1]

    def to_dense(self) -> Array:
        size = self.size
        dense = np.zeros((size, size))
        for offset in range(-self.lower, self.upper + 1):
            i = np.arange(max(0, -offset), min(size, size - offset))
            dense[i, i + offset] = self.ab[self.upper - offset, i + offset]
        return dense


def solve_banded(matrix: BandedMatrix, rhs: Array) -> tuple[Array, int]:
    """Solve with banded LU and partial pivoting.

    Returns the solution and the LAPACK ``info`` code; a positive code
    is the 1-based index of an exactly zero pivot.
    """
    lower, upper = matrix.lower, matrix.upper
    work = np.zeros((2 * lower + upper + 1, matrix.size))
    work[lower:] = matrix.ab
    (gbsv,) = linalg.get_lapack_funcs(("gbsv",), (work, rhs))
    _, _, solution, info = gbsv(
        lower, upper, work, rhs, overwrite_ab=True, overwrite_b=False
    )
    return solution, int(info)


class CollocationProblem:
    """Discrete boundary value problem on a fixed mesh.

    Parameters
    ----------
    params
        Problem parameters.
    mesh
        Mesh spanning ``[0, 1]``.
    options
        Solver options; ``series_trust`` and ``cap_reference`` select
        the caps.
    """

    def __init__(
        self,
        params: _model.ModelParams,
        mesh: Mesh,
        options: SolveOptions,
    ) -> None:
        self.params = params
        self.mesh = mesh
        self.options = options
        self.n = params.n
        self.m = params.m
        self.symmetry = params.symmetry
        self.trust = cap_width(
            options.series_trust, mesh.size, options.cap_reference
        )
        self.left, self.right = collocation_window(mesh.nodes, self.trust)
        self.x = mesh.nodes[self.left : self.right + 1]
        self.h = np.diff(self.x)
        self.log_t0 = np.log(params.boundary_data().t0[: self.m - 1])
        self.origin_order = (
            options.origin_order
            or endpoint_series.default_origin_order(self.n)
        )
        if not 2 <= self.origin_order <= self.n + 2:
            raise errors.UnsupportedOrderError(
                f"Origin expansion order must lie in [2, {self.n + 2}],"
                f" got {self.origin_order}"
            )
        self.center_order = options.center_order

    @property
    def nodes(self) -> int:
        """Number of collocated nodes."""
        return len(self.x)

    @property
    def n_origin(self) -> int:
        return self.m + 1

    @property
    def n_center(self) -> int:
        return self.m - 1

    @property
    def size(self) -> int:
        return 2 * self.m * (self.nodes + 1)

    @property
    def lower(self) -> int:
        return 3 * self.m - 2

    @property
    def upper(self) -> int:
        return 3 * self.m

    def unpack(self, X: Array) -> tuple[Array, Array, Array]:
        """Split into origin data, node states ``(nodes, 2m)`` and center
        data."""
        z_end = self.n_origin + 2 * self.m * self.nodes
        return (
            X[: self.n_origin],
            X[self.n_origin : z_end].reshape(self.nodes, 2 * self.m),
            X[z_end:],
        )

    def pack(self, p_origin: Array, z: Array, p_center: Array) -> Array:
        return np.concatenate([p_origin, z.ravel(), p_center])

    def node_of_column(self, column: int) -> int:
        """Return the mesh index that owns an unknown."""
        local = (column - self.n_origin) // (2 * self.m)
        return self.left + min(max(local, 0), self.nodes - 1)

    def origin_coefficients(self, p_origin: Array) -> Array:
        initial = np.concatenate([p_origin[:1], self.log_t0])
        return endpoint_series.origin_coefficients(
            initial,
            p_origin[1],
            p_origin[2:],
            self.origin_order,
            self.n,
            self.symmetry,
        )

    def center_coefficients(self, p_center: Array) -> Array:
        return endpoint_series.center_coefficients(
            p_center, self.center_order, self.n, self.symmetry
        )

    def _origin_closure(self, p_origin: Array) -> Array:
        y, dy, _ = endpoint_series.series_state(
            self.origin_coefficients(p_origin), self.x[0], at_center=False
        )
        return np.concatenate([y, dy])

    def _center_closure(self, p_center: Array) -> Array:
        y, dy, _ = endpoint_series.series_state(
            self.center_coefficients(p_center),
            1 - self.x[-1],
            at_center=True,
        )
        return np.concatenate([y, dy])

    def _closure_jacobian(
        self,
        closure: t.Callable[[Array], Array],
        p: Array,
        affine: cabc.Container[int],
    ) -> Array:
        out = np.empty((2 * self.m, len(p)))
        for j in range(len(p)):
            # The truncated series is affine in the nonlocal data.
            if j in affine:
                step = 1.0
            else:
                step = FD_STEP * max(1.0, abs(p[j]))
            up, down = p.copy(), p.copy()
            up[j] += step
            down[j] -= step
            out[:, j] = (closure(up) - closure(down)) / (2 * step)
        return out

    def check_state(self, X: Array) -> None:
        """Raise if a node state is not finite or would overflow."""
        p_origin, z, p_center = self.unpack(X)
        bad = ~np.all(np.isfinite(z), axis=1) | np.any(
            np.abs(z[:, : self.m]) > LOG_LIMIT, axis=1
        )
        if np.any(bad):
            node = self.left + int(np.flatnonzero(bad)[0])
            raise errors.PositivityLossError(
                f"Metric coefficients left the positive finite range at"
                f" mesh node {node} (x={self.mesh.nodes[node]:.6g})",
                node=node,
            )
        if not (
            np.all(np.isfinite(p_origin)) and np.all(np.isfinite(p_center))
        ):
            raise errors.PositivityLossError("Series data are not finite")
        if abs(p_origin[0]) > LOG_LIMIT:
            raise errors.PositivityLossError(
                f"K(0) left the positive range: log K0 = {p_origin[0]}",
                node=0,
            )

    def _flow(self, x: Array, zt: Array) -> Array:
        y, v = zt[: self.m], zt[self.m :]
        a = ode_system.rhs(x, y, v, self.n, self.symmetry)
        return np.concatenate([v, a])

    def _flow_jacobian(self, x: Array, zt: Array) -> Array:
        m = self.m
        da_dy, da_dv = ode_system.rhs_jacobian(
            x, zt[:m], zt[m:], self.n, self.symmetry
        )
        out = np.zeros((len(x), 2 * m, 2 * m))
        out[:, :m, m:] = np.eye(m)
        out[:, m:, :m] = np.moveaxis(da_dy, -1, 0)
        out[:, m:, m:] = np.moveaxis(da_dv, -1, 0)
        return out

    def _midpoints(self, zt: Array, f: Array) -> tuple[Array, Array]:
        h = self.h
        zm = 0.5 * (zt[:, :-1] + zt[:, 1:]) - h / 8 * (f[:, 1:] - f[:, :-1])
        return self.x[:-1] + h / 2, zm

    def residual(self, X: Array) -> Array:
        """Return the discrete residual: closure rows and interval rows."""
        self.check_state(X)
        p_origin, z, p_center = self.unpack(X)
        zt = z.T
        f = self._flow(self.x, zt)
        xm, zm = self._midpoints(zt, f)
        fm = self._flow(xm, zm)
        h = self.h
        interval = (
            zt[:, 1:]
            - zt[:, :-1]
            - h / 6 * (f[:, :-1] + 4 * fm + f[:, 1:])
        )
        return np.concatenate(
            [
                z[0] - self._origin_closure(p_origin),
                interval.T.ravel(),
                z[-1] - self._center_closure(p_center),
            ]
        )

    def jacobian(self, X: Array) -> BandedMatrix:
        """Return the Newton matrix in band storage."""
        self.check_state(X)
        p_origin, z, p_center = self.unpack(X)
        m2 = 2 * self.m
        upper = self.upper
        ab = np.zeros((self.lower + upper + 1, self.size))

        def put(row0: int, col0: int, block: Array) -> None:
            r = row0 + np.arange(block.shape[0])[:, np.newaxis]
            c = col0 + np.arange(block.shape[1])[np.newaxis, :]
            ab[upper + r - c, c] = block

        eye = np.eye(m2)
        put(
            0,
            0,
            -self._closure_jacobian(
                self._origin_closure, p_origin, range(2, self.n_origin)
            ),
        )
        put(0, self.n_origin, eye)

        zt = z.T
        f = self._flow(self.x, zt)
        xm, zm = self._midpoints(zt, f)
        jac = self._flow_jacobian(self.x, zt)
        jac_mid = self._flow_jacobian(xm, zm)
        hk = self.h[:, np.newaxis, np.newaxis]
        j_left, j_right = jac[:-1], jac[1:]
        block_left = -eye - hk / 6 * (
            j_left + 4 * jac_mid @ (eye / 2 + hk / 8 * j_left)
        )
        block_right = eye - hk / 6 * (
            j_right + 4 * jac_mid @ (eye / 2 - hk / 8 * j_right)
        )
        k = np.arange(self.nodes - 1)[:, np.newaxis, np.newaxis]
        ri = np.arange(m2)[np.newaxis, :, np.newaxis]
        ci = np.arange(m2)[np.newaxis, np.newaxis, :]
        rows = m2 + m2 * k + ri
        cols = self.n_origin + m2 * k + ci
        ab[upper + rows - cols, cols] = block_left
        ab[upper + rows - cols - m2, cols + m2] = block_right

        last_row = m2 * self.nodes
        put(last_row, self.n_origin + m2 * (self.nodes - 1), eye)
        put(
            last_row,
            self.n_origin + m2 * self.nodes,
            -self._closure_jacobian(
                self._center_closure, p_center, range(0)
            ),
        )
        return BandedMatrix(ab, self.lower, upper)

    def newton_step(self, matrix: BandedMatrix, F: Array) -> Array:
        """Return ``−A⁻¹F``.

        Raises
        ------
        SingularJacobianError
            If the factorization meets an exactly zero pivot.
        """
        step, info = solve_banded(matrix, -F)
        if info > 0:
            pivot = info - 1
            raise errors.SingularJacobianError(
                self.node_of_column(pivot), pivot
            )
        if info < 0:
            raise errors.InvalidParameterError(
                f"Illegal argument {-info} in the banded solver"
            )
        return step

    def initial_vector(
        self,
        guess: SolutionGrid,
        origin_params: Array | None = None,
        center_params: Array | None = None,
    ) -> Array:
        """Pack a guess on this mesh into the unknown vector.

        Missing series data are read off the guess: ``log K0 = y₁(0)``,
        the curvature from ``y₁''(0)/2``, zero nonlocal data and the
        ``u²`` coefficients from ``y''(1)/2``.
        """
        if len(guess.x) != len(self.mesh.nodes) or not np.allclose(
            guess.x, self.mesh.nodes, rtol=0, atol=1e-15
        ):
            guess = guess.resample(self.mesh)
        if origin_params is None:
            origin_params = np.concatenate(
                [
                    [guess.y[0, 0], guess.ddy[0, 0] / 2],
                    np.zeros(self.m - 1),
                ]
            )
        if center_params is None:
            center_params = guess.ddy[1:, -1] / 2
        window = slice(self.left, self.right + 1)
        z = np.concatenate([guess.y[:, window], guess.dy[:, window]]).T
        return self.pack(
            np.asarray(origin_params, dtype=np.float64),
            z,
            np.asarray(center_params, dtype=np.float64),
        )

    def to_grid(self, X: Array) -> SolutionGrid:
        """Return the profiles on the whole mesh.

        Cap nodes are filled from the expansions.
        """
        p_origin, z, p_center = self.unpack(X)
        nodes = self.mesh.nodes
        shape = (self.m, len(nodes))
        y, dy, ddy = np.empty(shape), np.empty(shape), np.empty(shape)

        window = slice(self.left, self.right + 1)
        y[:, window] = z[:, : self.m].T
        dy[:, window] = z[:, self.m :].T
        ddy[:, window] = ode_system.rhs(
            self.x, y[:, window], dy[:, window], self.n, self.symmetry
        )

        head = slice(0, self.left)
        y[:, head], dy[:, head], ddy[:, head] = endpoint_series.series_state(
            self.origin_coefficients(p_origin), nodes[head], at_center=False
        )
        tail = slice(self.right + 1, None)
        y[:, tail], dy[:, tail], ddy[:, tail] = endpoint_series.series_state(
            self.center_coefficients(p_center),
            1 - nodes[tail],
            at_center=True,
        )
        return SolutionGrid(
            params=self.params, x=nodes.copy(), y=y, dy=dy, ddy=ddy
        )

    def extra_residuals(self, X: Array) -> Array:
        """Return the sup-norms of the two extra equations over the
        collocated nodes."""
        _, z, _ = self.unpack(X)
        y, v = z[:, : self.m].T, z[:, self.m :].T
        ddy = ode_system.rhs(self.x, y, v, self.n, self.symmetry)
        extra = ode_system.evaluate(
            self.x, y, v, ddy, self.n, self.symmetry
        ).r_extra
        return np.max(np.abs(extra), axis=1)


def assemble(
    guess: SolutionGrid,
    params: _model.ModelParams,
    mesh: Mesh,
    options: SolveOptions,
) -> tuple[Array, BandedMatrix]:
    """Return the discrete residual and Newton matrix at a guess."""
    problem = CollocationProblem(params, mesh, options)
    X = problem.initial_vector(guess)
    return problem.residual(X), problem.jacobian(X)
