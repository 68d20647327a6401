# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Residuals and Jacobians of the Einstein ODE system in log-variables.

The unknowns are ``y₁ = log K`` and ``y_{i+1} = log t_i``. The full
system consists of six equations: the ``y₁`` equation with the Ψ
forcing, the ``y₁`` equation with the Υ forcing, three ``t_i``
equations and the first-order constraint. Four of them (the first
``y₁`` equation and the three ``t_i`` equations) form the *solved set*;
the other two are exposed as overdetermination residuals.

Reduced symmetry classes are evaluated by replicating the reduced state
into four components and selecting the rows of the solved set that
belong to distinct unknowns. Every function broadcasts over trailing
axes: ``y`` has shape ``(m, ...)`` and ``x`` shape ``(...)``.
"""

from __future__ import annotations

import dataclasses
import logging
import typing as t

import numpy as np
import numpy.typing as npt

from . import errors
from . import model as _model

__all__ = [
    "DerivedFields",
    "JacobianBlock",
    "ResidualVector",
    "StateSample",
    "derived_fields",
    "evaluate",
    "jacobian",
    "partials",
    "psi",
    "residual",
    "rhs",
    "rhs_jacobian",
    "upsilon",
    "y1prime_closed_form",
]

logger = logging.getLogger(__name__)

Array: t.TypeAlias = npt.NDArray[np.float64]
ArrayLike: t.TypeAlias = npt.ArrayLike

EXTRA_EQUATIONS = ("y1_upsilon", "constraint")
"""Names of the two overdetermination residuals, in storage order."""


@dataclasses.dataclass(frozen=True)
class StateSample:
    """State of the unknowns at one or more abscissae."""

    x: Array
    """Compactified radial coordinate ``x = e^{-r}``."""
    y: Array
    """Log-variables, shape ``(m, ...)``."""
    dy: Array
    """First derivatives with respect to ``x``."""
    ddy: Array | None = None
    """Second derivatives; required for residual evaluation."""

    def __post_init__(self) -> None:
        for name in ("x", "y", "dy", "ddy"):
            value = getattr(self, name)
            if value is None:
                continue
            value = np.asarray(value, dtype=np.float64)
            if not np.all(np.isfinite(value)):
                raise errors.InvalidParameterError(
                    f"State sample has non-finite entries in {name!r}"
                )
            object.__setattr__(self, name, value)

    @property
    def m(self) -> int:
        return self.y.shape[0]


@dataclasses.dataclass(frozen=True)
class DerivedFields:
    """Metric quantities derived from a state."""

    K: Array
    """Relative volume density ``K = exp(y₁)``."""
    t: Array
    """Anisotropy ratios, shape ``(3, ...)``, replicated for reduced
    classes."""
    I: Array  # noqa: E741
    """Metric coefficients ``I₁..I₄``, shape ``(4, ...)``."""
    psi: Array | None
    """Quadratic form Ψ of the derivatives, if derivatives were given."""
    upsilon: Array
    """Curvature functional Υ."""


class ResidualVector(t.NamedTuple):
    """Residuals of the solved set and of the two extra equations."""

    r: Array
    """Solved-set residuals, shape ``(m, ...)``."""
    r_extra: Array
    """Residuals of the Υ form of the ``y₁`` equation and of the
    first-order constraint, shape ``(2, ...)``."""


class JacobianBlock(t.NamedTuple):
    """Partial derivatives of the solved-set residuals."""

    d_r_d_y: Array
    d_r_d_dy: Array
    d_r_d_ddy: Array


def replicate(values: Array, symmetry: _model.SymmetryClass) -> Array:
    """Expand reduced unknowns along axis 0 to the four full ones."""
    return values[list(symmetry.replication)]


def reduce_columns(
    full: Array, symmetry: _model.SymmetryClass
) -> Array:
    """Sum full Jacobian columns into the columns of the reduced class.

    ``full`` has shape ``(rows, 4, ...)``; the result has shape
    ``(rows, m, ...)``.
    """
    rep = symmetry.replication
    out = np.zeros(
        (full.shape[0], symmetry.unknowns, *full.shape[2:]), dtype=full.dtype
    )
    for column, target in enumerate(rep):
        out[:, target] += full[:, column]
    return out


def psi(dy2: ArrayLike, dy3: ArrayLike, dy4: ArrayLike, n: int) -> Array:
    """Return the quadratic form Ψ of the anisotropy derivatives.

    ``Ψ = Σ_i ((n−1)y_i' − Σ_{j≠i} y_j')² + (n−3)(y₂'+y₃'+y₄')²``.
    """
    q, q4 = _psi_terms(
        np.asarray(dy2, dtype=np.float64),
        np.asarray(dy3, dtype=np.float64),
        np.asarray(dy4, dtype=np.float64),
        n,
    )
    return np.sum(q * q, axis=0) + (n - 3) * q4 * q4


def _psi_terms(
    d2: Array, d3: Array, d4: Array, n: int
) -> tuple[Array, Array]:
    q4 = d2 + d3 + d4
    q = np.stack([n * d2 - q4, n * d3 - q4, n * d4 - q4])
    return q, q4


def _quotient_over_product(t3: Array) -> tuple[Array, Array]:
    p = t3[0] * t3[1] * t3[2]
    h = _model.quotient_form(t3[0], t3[1], t3[2])
    return h, p


def upsilon(f: DerivedFields, n: int) -> Array:
    """Return Υ from the derived fields.

    ``Υ = n(n−1) − (K⁻¹t₁t₂t₃)^{1/n}[(n−3)(n+5) − (n−3)Σt + 2H/(t₁t₂t₃)]``
    with ``H`` the quotient form.
    """
    return _upsilon(f.K, f.t, n)


def _upsilon(K: Array, t3: Array, n: int) -> Array:
    h, p = _quotient_over_product(t3)
    e = (p / K) ** (1 / n)
    bracket = (n - 3) * (n + 5) - (n - 3) * np.sum(t3, axis=0) + 2 * h / p
    return n * (n - 1) - e * bracket


def derived_fields(
    y: ArrayLike,
    n: int,
    symmetry: _model.SymmetryClass,
    dy: ArrayLike | None = None,
) -> DerivedFields:
    """Map log-variables to ``K``, ``t``, ``I``, Ψ and Υ.

    Reduced classes replicate the repeated ratio so that downstream code
    does not need to know the class.
    """
    y4 = replicate(np.asarray(y, dtype=np.float64), symmetry)
    K = np.exp(y4[0])
    t3 = np.exp(y4[1:])
    i4 = np.exp((y4[0] - np.sum(y4[1:], axis=0)) / n)
    metric = np.concatenate([t3 * i4, i4[np.newaxis]])
    psi_val = None
    if dy is not None:
        d4 = replicate(np.asarray(dy, dtype=np.float64), symmetry)
        psi_val = psi(d4[1], d4[2], d4[3], n)
    return DerivedFields(
        K=K, t=t3, I=metric, psi=psi_val, upsilon=_upsilon(K, t3, n)
    )


@dataclasses.dataclass(frozen=True)
class _Coefficients:
    c1: Array
    c2: Array
    ct: Array
    c12: Array
    w: Array


def _coefficients(x: Array, n: int) -> _Coefficients:
    x2 = x * x
    denom = x * (1 - x2)
    return _Coefficients(
        c1=(1 + 3 * x2) / denom,
        c2=(2 * n - 1 + (2 * n + 1) * x2) / denom,
        ct=(n - 1 + (n + 1) * x2) / denom,
        c12=(1 + x2) / denom,
        w=8 / ((1 - x2) * (1 - x2)),
    )


def _check_interior(x: Array) -> None:
    if np.any(x <= 0) or np.any(x >= 1):
        raise errors.DomainError(
            "Residuals are only defined for 0 < x < 1; use the endpoint"
            " series at the boundary"
        )


def _forcing(t3: Array, n: int) -> Array:
    """Return the brackets ``F_i`` of the three ``t_i`` equations."""
    p = t3[0] * t3[1] * t3[2]
    total = np.sum(t3, axis=0)
    rows = []
    for i in range(3):
        j, k = (idx for idx in range(3) if idx != i)
        g = t3[i] ** 2 - (t3[j] - t3[k]) ** 2
        rows.append(
            (n - 1) * t3[i] + 2 * (total - t3[i]) - n - 5 + 2 * g / p
        )
    return np.stack(rows)


def _forcing_partials(t3: Array, n: int) -> Array:
    """Return ``∂F_i/∂t_l``, shape ``(3, 3, ...)``."""
    p = t3[0] * t3[1] * t3[2]
    out = np.empty((3, 3, *t3.shape[1:]))
    for i in range(3):
        j, k = (idx for idx in range(3) if idx != i)
        g = t3[i] ** 2 - (t3[j] - t3[k]) ** 2
        for l in range(3):  # noqa: E741
            if l == i:
                linear = n - 1
                dg = 2 * t3[i]
            else:
                (other,) = (idx for idx in range(3) if idx not in (i, l))
                linear = 2
                dg = -2 * (t3[l] - t3[other])
            out[i, l] = linear + 2 * dg / p - 2 * g / (p * t3[l])
    return out


def _full_residuals(
    x: Array, y4: Array, d4: Array, dd4: Array, n: int
) -> tuple[Array, Array]:
    c = _coefficients(x, n)
    t3 = np.exp(y4[1:])
    e = np.exp((np.sum(y4[1:], axis=0) - y4[0]) / n)
    psi_val = psi(d4[1], d4[2], d4[3], n)
    ups = _upsilon(np.exp(y4[0]), t3, n)
    forcing = _forcing(t3, n)

    d1 = d4[0]
    solved = np.empty_like(d4)
    solved[0] = dd4[0] - c.c1 * d1 + (n * d1 * d1 + psi_val) / (2 * n * n)
    solved[1:] = (
        dd4[1:] - c.ct * d4[1:] + 0.5 * d1 * d4[1:] - c.w * e * forcing
    )

    extra = np.stack(
        [
            dd4[0] - c.c2 * d1 + 0.5 * d1 * d1 + c.w * ups,
            d1 * d1
            - 4 * n * c.c12 * d1
            - psi_val / (n * (n - 1))
            + 2 * n / (n - 1) * c.w * ups,
        ]
    )
    return solved, extra


def _full_partials(
    x: Array, y4: Array, d4: Array, n: int
) -> tuple[Array, Array]:
    c = _coefficients(x, n)
    t3 = np.exp(y4[1:])
    e = np.exp((np.sum(y4[1:], axis=0) - y4[0]) / n)
    forcing = _forcing(t3, n)
    dforcing = _forcing_partials(t3, n)
    q, _ = _psi_terms(d4[1], d4[2], d4[3], n)

    shape = (4, 4, *np.shape(x))
    d_y = np.zeros(shape)
    d_dy = np.zeros(shape)

    d_dy[0, 0] = -c.c1 + d4[0] / n
    d_dy[0, 1:] = q / n
    for i in range(1, 4):
        d_dy[i, 0] = 0.5 * d4[i]
        d_dy[i, i] = -c.ct + 0.5 * d4[0]
        f_i = forcing[i - 1]
        d_y[i, 0] = c.w * e * f_i / n
        for l in range(1, 4):  # noqa: E741
            d_y[i, l] = -c.w * (
                e * f_i / n + e * dforcing[i - 1, l - 1] * t3[l - 1]
            )
    return d_y, d_dy


def evaluate(
    x: ArrayLike,
    y: ArrayLike,
    dy: ArrayLike,
    ddy: ArrayLike,
    n: int,
    symmetry: _model.SymmetryClass,
) -> ResidualVector:
    """Evaluate solved-set and extra residuals on raw arrays."""
    xa = np.asarray(x, dtype=np.float64)
    _check_interior(xa)
    solved, extra = _full_residuals(
        xa,
        replicate(np.asarray(y, dtype=np.float64), symmetry),
        replicate(np.asarray(dy, dtype=np.float64), symmetry),
        replicate(np.asarray(ddy, dtype=np.float64), symmetry),
        n,
    )
    return ResidualVector(solved[list(symmetry.solved_rows)], extra)


def partials(
    x: ArrayLike,
    y: ArrayLike,
    dy: ArrayLike,
    n: int,
    symmetry: _model.SymmetryClass,
) -> tuple[Array, Array]:
    """Return ``(∂r/∂y, ∂r/∂y')`` of the solved set, shape ``(m, m, ...)``."""
    xa = np.asarray(x, dtype=np.float64)
    _check_interior(xa)
    d_y, d_dy = _full_partials(
        xa,
        replicate(np.asarray(y, dtype=np.float64), symmetry),
        replicate(np.asarray(dy, dtype=np.float64), symmetry),
        n,
    )
    rows = list(symmetry.solved_rows)
    return (
        reduce_columns(d_y[rows], symmetry),
        reduce_columns(d_dy[rows], symmetry),
    )


def rhs(
    x: ArrayLike,
    y: ArrayLike,
    dy: ArrayLike,
    n: int,
    symmetry: _model.SymmetryClass,
) -> Array:
    """Return ``y''`` solved from the solved set."""
    dya = np.asarray(dy, dtype=np.float64)
    return -evaluate(x, y, dya, np.zeros_like(dya), n, symmetry).r


def rhs_jacobian(
    x: ArrayLike,
    y: ArrayLike,
    dy: ArrayLike,
    n: int,
    symmetry: _model.SymmetryClass,
) -> tuple[Array, Array]:
    """Return the partials of [rhs][sp_einstein_fillings.ode_system.rhs]."""
    d_y, d_dy = partials(x, y, dy, n, symmetry)
    return -d_y, -d_dy


def residual(s: StateSample, params: _model.ModelParams) -> ResidualVector:
    """Evaluate the residuals of a state sample.

    Parameters
    ----------
    s
        Interior state with second derivatives.
    params
        Problem parameters; ``params.symmetry`` selects the solved set.

    Returns
    -------
    residuals
        The solved-set residuals in the printed scaling, and the
        residuals of the Υ form of the ``y₁`` equation and of the
        first-order constraint.

    Raises
    ------
    DomainError
        If any ``x`` is not in ``(0, 1)``.
    """
    if s.ddy is None:
        raise errors.InvalidParameterError(
            "Residual evaluation needs second derivatives"
        )
    return evaluate(s.x, s.y, s.dy, s.ddy, params.n, params.symmetry)


def jacobian(s: StateSample, params: _model.ModelParams) -> JacobianBlock:
    """Return the exact partials of the solved-set residuals."""
    d_y, d_dy = partials(s.x, s.y, s.dy, params.n, params.symmetry)
    m = params.m
    eye = np.eye(m).reshape((m, m) + (1,) * np.ndim(s.x))
    d_ddy = np.broadcast_to(eye, d_y.shape).copy()
    return JacobianBlock(d_y, d_dy, d_ddy)


def y1prime_closed_form(
    x: ArrayLike,
    n: int,
    *,
    fields: DerivedFields | None = None,
    psi_val: ArrayLike | None = None,
    upsilon_val: ArrayLike | None = None,
) -> Array:
    """Return ``y₁'`` from the first-order constraint.

    The constraint is quadratic in ``y₁'``; the root with the minus sign
    in front of the square root is the one vanishing at ``x = 0``.
    Values of Ψ and Υ not given explicitly are taken from ``fields``.

    Raises
    ------
    BranchViolationError
        If the discriminant is negative.
    """
    xa = np.asarray(x, dtype=np.float64)
    _check_interior(xa)
    if psi_val is None:
        if fields is None or fields.psi is None:
            raise errors.InvalidParameterError("Ψ is required")
        psi_val = fields.psi
    if upsilon_val is None:
        if fields is None:
            raise errors.InvalidParameterError("Υ is required")
        upsilon_val = fields.upsilon
    psi_a = np.asarray(psi_val, dtype=np.float64)
    ups_a = np.asarray(upsilon_val, dtype=np.float64)

    x2 = xa * xa
    a = 1 - x2
    disc = (
        4 * n * n * (1 + x2) ** 2
        + x2 * a * a * psi_a / (n * (n - 1))
        - 16 * n * x2 * ups_a / (n - 1)
    )
    if np.any(disc < 0):
        raise errors.BranchViolationError(
            f"Negative discriminant in the y1' closed form: {np.min(disc)}"
        )
    return (2 * n * (1 + x2) - np.sqrt(disc)) / (xa * a)
