# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Total variation of profiles and the comparison of two solutions.

The variation of a sampled profile is measured on its piecewise cubic
interpolant: the interpolant is evaluated at the real roots of its
derivative and at both ends, and the absolute increments between
consecutive points are summed. For piecewise monotone profiles this is
exact up to the interpolation error, and node noise does not inflate
the result.
"""

from __future__ import annotations

import collections.abc as cabc
import logging
import typing as t

import numpy as np
import numpy.typing as npt
import pydantic
from scipy import interpolate

from .. import errors
from ..bvp_solver import (
    SolutionGrid,
    SolveOptions,
    SolveResult,
    build_mesh,
    newton_solve,
)

__all__ = [
    "NOISE_FLOOR",
    "UniquenessReport",
    "VariationReport",
    "compare_solutions",
    "critical_points",
    "perturbed_guess",
    "profiles_on_mesh",
    "profile_spline",
    "total_variation",
    "uniqueness_probe",
]

logger = logging.getLogger(__name__)

Array: t.TypeAlias = npt.NDArray[np.float64]

NOISE_FLOOR = 1e-11
"""Derivative magnitude below which signs are not trusted."""
PERTURBATION_AMPLITUDE = 0.3
"""Sup-norm of the perturbations used by the uniqueness probe."""


def profile_spline(
    x: npt.ArrayLike,
    values: npt.ArrayLike,
    derivative: npt.ArrayLike | None = None,
) -> interpolate.PPoly:
    """Return the cubic interpolant of a sampled profile.

    Hermite interpolation is used when derivatives are available, a
    not-a-knot cubic spline otherwise.
    """
    xa = np.asarray(x, dtype=np.float64)
    va = np.asarray(values, dtype=np.float64)
    if derivative is None:
        return interpolate.CubicSpline(xa, va, bc_type="not-a-knot")
    return interpolate.CubicHermiteSpline(
        xa, va, np.asarray(derivative, dtype=np.float64)
    )


def critical_points(spline: interpolate.PPoly) -> Array:
    """Return the interior roots of the derivative of ``spline``.

    Intervals on which the derivative vanishes identically contribute no
    roots.
    """
    lo, hi = spline.x[0], spline.x[-1]
    roots = spline.derivative().roots(extrapolate=False)
    roots = roots[np.isfinite(roots)]
    roots = roots[(roots > lo) & (roots < hi)]
    return np.unique(roots)


def total_variation(
    samples: npt.ArrayLike,
    x: npt.ArrayLike | None = None,
    derivative: npt.ArrayLike | None = None,
) -> float:
    """Return the total variation of a sampled profile.

    Parameters
    ----------
    samples
        Profile values at the nodes.
    x
        Strictly increasing nodes; a uniform grid on ``[0, 1]`` by
        default.
    derivative
        Optional derivative values at the nodes.

    Raises
    ------
    InvalidParameterError
        If the profile is not finite or has fewer than two samples.
    """
    values = np.asarray(samples, dtype=np.float64)
    if values.ndim != 1 or len(values) < 2:
        raise errors.InvalidParameterError(
            "A profile needs at least two samples"
        )
    if not np.all(np.isfinite(values)):
        raise errors.InvalidParameterError("Profile is not finite")
    nodes = (
        np.linspace(0.0, 1.0, len(values))
        if x is None
        else np.asarray(x, dtype=np.float64)
    )
    if not np.any(values != values[0]):
        return 0.0
    spline = profile_spline(nodes, values, derivative)
    points = np.concatenate([[nodes[0]], critical_points(spline), [nodes[-1]]])
    return float(np.sum(np.abs(np.diff(spline(points)))))


class VariationReport(pydantic.BaseModel):
    """Difference profiles of two solutions and their total variations."""

    model_config = pydantic.ConfigDict(frozen=True)

    x: tuple[float, ...]
    z: tuple[tuple[float, ...], ...]
    """Difference profiles ``z_j = y_{a,j} − y_{b,j}``."""
    V: tuple[float, ...]
    """Total variation of every difference profile."""
    V_full: tuple[float, float, float, float]
    """Total variations of the four replicated differences, labelled in
    the original λ order."""
    inequality_flags: tuple[bool, bool, bool, bool]
    """``V(z₁) <= ΣV(z_i)/n`` followed by
    ``V(z_i) <= (ΣV(z_j), j≠i)/(n−2)`` for the three ratios."""
    sup_norm: float
    """``max |z_j|`` over all profiles and nodes."""

    @property
    def all_flags(self) -> bool:
        return all(self.inequality_flags)


def _compatible(a: SolveResult, b: SolveResult, same_data: bool) -> None:
    pa, pb = a.params, b.params
    if pa.k != pb.k:
        raise errors.InvalidComparisonError(
            f"Cannot compare solutions of different rank: k={pa.k} and"
            f" k={pb.k}"
        )
    ta, tb = pa.boundary_data().t0, pb.boundary_data().t0
    if same_data and not np.allclose(ta, tb, rtol=0, atol=1e-12):
        raise errors.InvalidComparisonError(
            f"Solutions solve different boundary data: t0={ta} and t0={tb}"
        )


def profiles_on_mesh(
    grid: SolutionGrid, x: Array, *, labelled: bool = True
) -> tuple[Array, Array]:
    if labelled:
        y, dy, _ = grid.labelled()
    else:
        y, dy = grid.y, grid.dy
    if len(grid.x) == len(x) and np.array_equal(grid.x, x):
        return y, dy
    spline = interpolate.CubicHermiteSpline(grid.x, y, dy, axis=1)
    return spline(x), spline.derivative()(x)


def _inequality_flags(V: cabc.Sequence[float], n: int) -> list[bool]:
    total = sum(V)
    flags = [V[0] <= (total - V[0]) / n]
    for i in range(1, 4):
        flags.append(V[i] <= (total - V[i]) / (n - 2))
    return flags


def compare_solutions(
    a: SolveResult, b: SolveResult, *, same_data: bool = False
) -> VariationReport:
    """Compare two solutions through the total variation of differences.

    ``b`` is re-interpolated onto the mesh of ``a`` if the meshes
    differ, and the boundary data of the two solves may differ unless
    ``same_data`` is set. Solutions of the same symmetry class and
    permutation are compared in their own unknowns; otherwise both are
    replicated to the four unknowns in the original λ order.

    Raises
    ------
    InvalidComparisonError
        If the solutions belong to different ranks ``k``, or solve
        different boundary data while ``same_data`` is set.
    """
    _compatible(a, b, same_data)
    x = a.grid.x
    n = a.params.n
    ya, dya = profiles_on_mesh(a.grid, x)
    yb, dyb = profiles_on_mesh(b.grid, x)
    z_full = ya - yb
    dz_full = dya - dyb
    V_full = [total_variation(z_full[j], x, dz_full[j]) for j in range(4)]

    same = (
        a.params.symmetry is b.params.symmetry
        and a.params.permutation == b.params.permutation
    )
    if same:
        ya, dya = profiles_on_mesh(a.grid, x, labelled=False)
        yb, dyb = profiles_on_mesh(b.grid, x, labelled=False)
        z = ya - yb
        dz = dya - dyb
        V = [total_variation(z[j], x, dz[j]) for j in range(len(z))]
    else:
        z = z_full
        V = V_full
    flags = _inequality_flags(V_full, n)
    report = VariationReport(
        x=tuple(map(float, x)),
        z=tuple(tuple(map(float, row)) for row in z),
        V=tuple(V),
        V_full=tuple(V_full),  # type: ignore[arg-type]
        inequality_flags=tuple(flags),  # type: ignore[arg-type]
        sup_norm=float(np.max(np.abs(z))),
    )
    logger.debug(
        "Compared solutions: V=%s flags=%s", report.V, report.inequality_flags
    )
    return report


class UniquenessReport(pydantic.BaseModel):
    """Agreement of solves started from perturbed initial guesses."""

    model_config = pydantic.ConfigDict(frozen=True)

    seed: int
    count: int
    converged: int
    """Number of perturbed starts that converged."""
    max_pairwise_sup: float
    """Largest sup-norm difference between two converged solutions."""
    max_variation: float
    """Largest total variation of a difference to the reference."""


def _bump(x: Array) -> tuple[Array, Array, Array]:
    """Return ``16x²(1−x)²`` and its first two derivatives."""
    s = x * (1 - x)
    return (
        16 * s * s,
        32 * s * (1 - 2 * x),
        32 * (1 - 6 * x + 6 * x * x),
    )


def perturbed_guess(
    base: SolutionGrid, rng: np.random.Generator, amplitude: float
) -> SolutionGrid:
    """Return ``base`` plus a smooth perturbation vanishing at both ends.

    Every unknown receives a random multiple of a quartic bump with
    value and slope zero at ``x = 0`` and ``x = 1``.
    """
    weights = rng.uniform(-amplitude, amplitude, size=(base.m, 1))
    b, db, ddb = _bump(base.x)
    return SolutionGrid(
        params=base.params,
        x=base.x,
        y=base.y + weights * b,
        dy=base.dy + weights * db,
        ddy=base.ddy + weights * ddb,
    )


def uniqueness_probe(
    result: SolveResult,
    count: int = 10,
    seed: int = 0,
    *,
    amplitude: float = PERTURBATION_AMPLITUDE,
    options: SolveOptions | None = None,
) -> UniquenessReport:
    """Re-solve from perturbed zero guesses and compare the solutions.

    Starts that fail to converge are skipped and counted.
    """
    options = options or result.options
    params = result.params
    rng = np.random.default_rng(seed)
    base = SolutionGrid.zeros(
        params, build_mesh(options.mesh_size, options.grading)
    )
    solutions = [result]
    for i in range(count):
        guess = perturbed_guess(base, rng, amplitude)
        try:
            solutions.append(newton_solve(guess, params, options))
        except (
            errors.NonConvergenceError,
            errors.PositivityLossError,
            errors.SingularJacobianError,
        ) as err:
            logger.warning("Perturbed start %d did not converge: %s", i, err)

    max_sup = 0.0
    for i, first in enumerate(solutions):
        for second in solutions[i + 1 :]:
            ya, _ = profiles_on_mesh(first.grid, result.grid.x)
            yb, _ = profiles_on_mesh(second.grid, result.grid.x)
            max_sup = max(max_sup, float(np.max(np.abs(ya - yb))))
    max_variation = max(
        (
            max(compare_solutions(result, other, same_data=True).V)
            for other in solutions[1:]
        ),
        default=0.0,
    )
    return UniquenessReport(
        seed=seed,
        count=count,
        converged=len(solutions) - 1,
        max_pairwise_sup=max_sup,
        max_variation=max_variation,
    )
