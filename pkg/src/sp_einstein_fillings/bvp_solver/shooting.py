# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Two-sided shooting, an independent check of the collocation solver.

The center expansion is evaluated at its trust radius and the solved set
is integrated outward from the center to a matching point. The origin
branch starts from an unknown state at the matching point and is
integrated inward to the trust radius at ``x = 0``, where it has to meet
the expansion there. Both directions follow the decaying homogeneous
modes of their endpoint (``x^n`` toward ``x = 0``, ``u^{-(n+1)}`` away
from ``x = 1``), so integration errors are not amplified.

The unknowns are ``log K0`` and the nonlocal coefficients at ``x = 0``
(the curvature follows from the constraint), the free ``u²``
coefficients at ``x = 1`` and the state at the matching point. The
residual consists of the closure at the origin cap, the ``2m`` matching
conditions and the first-order constraint at the matching point and is
driven to zero by Levenberg–Marquardt.
"""

from __future__ import annotations

import logging
import typing as t

import numpy as np
import numpy.typing as npt
from scipy import integrate, optimize

from .. import endpoint_series, errors, ode_system
from .. import model as _model
from .collocation import LOG_LIMIT
from .grid import SolutionGrid
from .mesh import Mesh, build_mesh
from .newton import SolveResult
from .options import SolveOptions

__all__ = [
    "MATCH_RANGE",
    "ShootingProblem",
    "shooting_oracle",
]

logger = logging.getLogger(__name__)

Array: t.TypeAlias = npt.NDArray[np.float64]
Branch: t.TypeAlias = integrate.OdeSolution

MATCH_RANGE = (0.2, 0.8)
"""Open interval of admissible matching points."""
RTOL = 1e-12
ATOL = 1e-14
MATCH_TOL = 1e-8
"""Largest matching residual accepted as converged."""


class ShootingProblem:
    """Matching residual of the two-sided shooting."""

    def __init__(
        self,
        params: _model.ModelParams,
        match_point: float,
        options: SolveOptions,
    ) -> None:
        low, high = MATCH_RANGE
        if not low < match_point < high:
            raise errors.DomainError(
                f"Matching point must lie in {MATCH_RANGE}: {match_point}"
            )
        self.params = params
        self.n = params.n
        self.m = params.m
        self.symmetry = params.symmetry
        self.match_point = float(match_point)
        self.trust = options.series_trust
        self.bd = params.boundary_data()
        self.log_t0 = np.log(self.bd.t0[: self.m - 1])
        self.origin_order = (
            options.origin_order
            or endpoint_series.default_origin_order(self.n)
        )
        self.center_order = options.center_order

    @property
    def series_unknowns(self) -> int:
        """Number of free expansion data."""
        return 2 * self.m - 1

    @property
    def unknowns(self) -> int:
        return self.series_unknowns + 2 * self.m

    def split(self, p: Array) -> tuple[float, Array, Array, Array]:
        """Return ``log K0``, the nonlocal data, the center data and the
        state at the matching point."""
        m = self.m
        return (
            float(p[0]),
            p[1:m],
            p[m : 2 * m - 1],
            p[2 * m - 1 :],
        )

    def origin_coefficients(self, p: Array) -> Array:
        log_k0, nonlocal_, _, _ = self.split(p)
        fields = ode_system.derived_fields(
            np.concatenate([[log_k0], np.log(self.bd.t0)]),
            self.n,
            _model.SymmetryClass.FULL,
        )
        curvature = 2 * float(fields.upsilon) / (self.n - 1)
        return endpoint_series.origin_coefficients(
            np.concatenate([[log_k0], self.log_t0]),
            curvature,
            nonlocal_,
            self.origin_order,
            self.n,
            self.symmetry,
        )

    def center_coefficients(self, p: Array) -> Array:
        return endpoint_series.center_coefficients(
            self.split(p)[2], self.center_order, self.n, self.symmetry
        )

    def _flow(self, x: float, z: Array) -> Array:
        y, v = z[: self.m], z[self.m :]
        if not np.all(np.isfinite(z)) or np.any(np.abs(y) > LOG_LIMIT):
            raise errors.BranchViolationError(
                f"Shooting integration blew up at x={x:.6g}"
            )
        return np.concatenate(
            [v, ode_system.rhs(x, y, v, self.n, self.symmetry)]
        )

    def _integrate(self, start: float, stop: float, z0: Array) -> Branch:
        sol = integrate.solve_ivp(
            self._flow,
            (start, stop),
            z0,
            method="DOP853",
            rtol=RTOL,
            atol=ATOL,
            dense_output=True,
        )
        if sol.status != 0 or not np.all(np.isfinite(sol.y)):
            raise errors.BranchViolationError(
                f"Shooting integration from x={start:.6g} failed:"
                f" {sol.message}"
            )
        return sol.sol

    def center_branch(self, p: Array) -> Branch:
        """Integrate from the center trust radius to the matching point."""
        y, dy, _ = endpoint_series.series_state(
            self.center_coefficients(p), self.trust, at_center=True
        )
        return self._integrate(
            1 - self.trust, self.match_point, np.concatenate([y, dy])
        )

    def origin_branch(self, p: Array) -> Branch:
        """Integrate from the matching point to the origin trust radius."""
        return self._integrate(self.match_point, self.trust, self.split(p)[3])

    def origin_state(self, p: Array) -> Array:
        y, dy, _ = endpoint_series.series_state(
            self.origin_coefficients(p), self.trust, at_center=False
        )
        return np.concatenate([y, dy])

    def residual(self, p: Array) -> Array:
        z_match = self.split(p)[3]
        closure = self.origin_branch(p)(self.trust) - self.origin_state(p)
        matching = z_match - self.center_branch(p)(self.match_point)
        y, v = z_match[: self.m], z_match[self.m :]
        ddy = ode_system.rhs(self.match_point, y, v, self.n, self.symmetry)
        constraint = ode_system.evaluate(
            self.match_point, y, v, ddy, self.n, self.symmetry
        ).r_extra[1]
        return np.concatenate([closure, matching, [constraint]])

    def initial_unknowns(self, series: Array) -> Array:
        """Complete expansion data with the matching state they imply.

        The matching state is read off the center branch.
        """
        p = np.concatenate([series, np.zeros(2 * self.m)])
        return np.concatenate(
            [series, self.center_branch(p)(self.match_point)]
        )

    def to_grid(self, p: Array, mesh: Mesh) -> SolutionGrid:
        """Sample the matched solution on a mesh.

        The expansions cover both caps and the dense outputs of the two
        integrations cover their sides of the matching point.
        """
        left, right = self.origin_branch(p), self.center_branch(p)
        x = mesh.nodes
        shape = (self.m, len(x))
        y, dy, ddy = np.empty(shape), np.empty(shape), np.empty(shape)

        head = x < self.trust
        y[:, head], dy[:, head], ddy[:, head] = endpoint_series.series_state(
            self.origin_coefficients(p), x[head], at_center=False
        )
        tail = x > 1 - self.trust
        y[:, tail], dy[:, tail], ddy[:, tail] = endpoint_series.series_state(
            self.center_coefficients(p), 1 - x[tail], at_center=True
        )
        for branch, mask in (
            (left, ~head & (x <= self.match_point)),
            (right, ~tail & (x > self.match_point)),
        ):
            if not np.any(mask):
                continue
            z = branch(x[mask])
            y[:, mask], dy[:, mask] = z[: self.m], z[self.m :]
            ddy[:, mask] = ode_system.rhs(
                x[mask], y[:, mask], dy[:, mask], self.n, self.symmetry
            )
        return SolutionGrid(
            params=self.params, x=x.copy(), y=y, dy=dy, ddy=ddy
        )


def shooting_oracle(
    bd: _model.BoundaryData,
    params: _model.ModelParams,
    match_point: float = 0.5,
    options: SolveOptions | None = None,
    *,
    initial: npt.ArrayLike | None = None,
) -> SolveResult:
    """Solve the boundary value problem by two-sided shooting.

    Parameters
    ----------
    bd
        Boundary ratios in canonical order; replaces those of ``params``.
    params
        Problem parameters.
    match_point
        Matching abscissa in ``(0.2, 0.8)``.
    options
        Trust radius, expansion orders and the output mesh.
    initial
        Starting expansion data ``(log K0, nonlocal, center)``; zero by
        default. The starting state at the matching point is taken from
        the center branch.

    Raises
    ------
    DomainError
        If ``match_point`` is outside ``(0.2, 0.8)``.
    BranchViolationError
        If an integration blows up.
    NonConvergenceError
        If the matching residual does not vanish.
    """
    options = options or SolveOptions()
    params = params.with_boundary_data(bd)
    problem = ShootingProblem(params, match_point, options)
    series = (
        np.zeros(problem.series_unknowns)
        if initial is None
        else np.asarray(initial, dtype=np.float64)
    )
    if len(series) != problem.series_unknowns:
        raise errors.InvalidParameterError(
            f"Expected {problem.series_unknowns} starting values, got"
            f" {len(series)}"
        )
    p0 = problem.initial_unknowns(series)
    residual0 = problem.residual(p0)
    if np.max(np.abs(residual0)) <= MATCH_TOL / 100:
        p, nfev = p0, 1
    else:
        fit = optimize.least_squares(
            problem.residual,
            p0,
            method="lm",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
        )
        p, nfev = fit.x, int(fit.nfev)
    final = problem.residual(p)
    norm = float(np.max(np.abs(final)))
    if not norm <= MATCH_TOL:
        raise errors.NonConvergenceError(
            f"Shooting did not match: residual {norm:.3e}", [norm]
        )
    logger.info("Shooting matched after %d evaluations: %.3e", nfev, norm)

    grid = problem.to_grid(p, build_mesh(options.mesh_size, options.grading))
    x = grid.x
    trust = options.series_trust
    interior = (x >= trust) & (x <= 1 - trust)
    extra = ode_system.evaluate(
        x[interior],
        grid.y[:, interior],
        grid.dy[:, interior],
        grid.ddy[:, interior],
        problem.n,
        problem.symmetry,
    ).r_extra
    extra_norm = np.max(np.abs(extra), axis=1)
    log_k0, nonlocal_, center, _ = problem.split(p)
    curvature = problem.origin_coefficients(p)[0, 2]
    return SolveResult(
        grid=grid,
        K0=float(np.exp(log_k0)),
        residual_solved=norm,
        residual_extra=(float(extra_norm[0]), float(extra_norm[1])),
        iterations=nfev,
        history=(float(np.max(np.abs(residual0))), norm),
        origin_params=(log_k0, float(curvature), *map(float, nonlocal_)),
        center_params=tuple(float(v) for v in center),
        options=options,
    )
