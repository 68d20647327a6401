# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Problem parameters, symmetry classes and closed-form scalar bounds.

The boundary metric on the sphere is described by four positive
coefficients λ₁..λ₄. Only the ratios ``t_i(0) = λ_i/λ₄`` enter the
boundary value problem, so λ₄ is divided out as soon as a
[BoundaryData][sp_einstein_fillings.model.BoundaryData] is built.

Everything in this module is a pure function of its arguments. The
scalar bounds accept numpy arrays as well, which the diagnostics use to
evaluate them along a whole solution grid.
"""

from __future__ import annotations

import collections.abc as cabc
import enum
import itertools
import logging
import typing as t

import numpy as np
import numpy.typing as npt
import pydantic

from . import errors

__all__ = [
    "DEFAULT_SYMMETRY_TOL",
    "BoundaryData",
    "ConditionReport",
    "ModelParams",
    "SymmetryClass",
    "SymmetryClassification",
    "check_conditions",
    "classify_symmetry",
    "dimension_from_k",
    "in_stability_range",
    "k0_lower_bound",
    "quotient_form",
    "smallness",
    "sp1_extremum_threshold",
    "sp1_t1_lower_bound",
    "t1_star",
    "t1_threshold",
    "t_upper_bound",
    "tau_quadratic",
    "u1_t1_cap_at_t2_minimum",
    "u1_t2_minimum_cap",
    "weyl_cap",
]

logger = logging.getLogger(__name__)

FloatOrArray = t.TypeVar("FloatOrArray", float, npt.NDArray[np.float64])

DEFAULT_SYMMETRY_TOL = 1e-12
"""Relative tolerance used to decide whether two λ ratios agree."""
STABILITY_RANGE = (2 / 3, 4 / 3)
"""Half-open range of ratios covered by the continuity-family existence
statement."""


class SymmetryClass(enum.Enum):
    """Symmetry class of the boundary metric.

    Attributes
    ----------
    FULL
        Only Sp(k+1) symmetry; four unknowns ``y₁..y₄``.
    SP1
        Sp(k+1)×Sp(1) symmetry, ``λ₁=λ₂=λ₃``; two unknowns ``(y₁, y₂)``.
    U1
        Sp(k+1)×U(1) symmetry, ``λ₂=λ₃`` after reordering; three
        unknowns ``(y₁, y₂, y₃)``.
    """

    FULL = "full"
    SP1 = "sp1"
    U1 = "u1"

    @property
    def unknowns(self) -> int:
        """Number of unknown profiles ``m``."""
        return len(set(self.replication))

    @property
    def replication(self) -> tuple[int, int, int, int]:
        """Reduced index feeding each of the four full unknowns."""
        return _REPLICATION[self]

    @property
    def solved_rows(self) -> tuple[int, ...]:
        """Rows of the full solved set that form this class' system."""
        return tuple(range(self.unknowns))


_REPLICATION: dict[SymmetryClass, tuple[int, int, int, int]] = {
    SymmetryClass.FULL: (0, 1, 2, 3),
    SymmetryClass.SP1: (0, 1, 1, 1),
    SymmetryClass.U1: (0, 1, 2, 2),
}


class SymmetryClassification(t.NamedTuple):
    """Result of [classify_symmetry][sp_einstein_fillings.model.classify_symmetry]."""

    symmetry: SymmetryClass
    """The detected class."""
    permutation: tuple[int, int, int]
    """Source index of each canonical ratio slot."""


def dimension_from_k(k: int) -> int:
    """Return the boundary dimension ``n = 4k+3``.

    Raises
    ------
    InvalidParameterError
        If ``k < 1``.
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise errors.InvalidParameterError(f"k must be an integer >= 1: {k}")
    return 4 * int(k) + 3


def _agree(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b))


def classify_symmetry(
    lambda_: cabc.Sequence[float], tol: float = DEFAULT_SYMMETRY_TOL
) -> SymmetryClassification:
    """Detect the symmetry class of boundary coefficients.

    Parameters
    ----------
    lambda_
        The four positive coefficients λ₁..λ₄.
    tol
        Relative tolerance on the ratios ``λ_i/λ₄``.

    Returns
    -------
    classification
        The class and the permutation that moves an equal pair into
        slots 2 and 3. For ``SP1`` and ``FULL`` the permutation is the
        identity.
    """
    _check_lambda(lambda_)
    ratios = [lam / lambda_[3] for lam in lambda_[:3]]
    equal = [
        (i, j)
        for i, j in itertools.combinations(range(3), 2)
        if _agree(ratios[i], ratios[j], tol)
    ]
    if len(equal) >= 2:
        return SymmetryClassification(SymmetryClass.SP1, (0, 1, 2))
    if len(equal) == 1:
        (i, j) = equal[0]
        (odd,) = {0, 1, 2} - {i, j}
        return SymmetryClassification(SymmetryClass.U1, (odd, i, j))
    return SymmetryClassification(SymmetryClass.FULL, (0, 1, 2))


def _check_lambda(lambda_: cabc.Sequence[float]) -> None:
    if len(lambda_) != 4:
        raise errors.InvalidParameterError(
            f"Expected four boundary coefficients, got {len(lambda_)}"
        )
    if not all(np.isfinite(lam) and lam > 0 for lam in lambda_):
        raise errors.InvalidParameterError(
            f"Boundary coefficients must be finite and positive: {lambda_}"
        )


class BoundaryData(pydantic.BaseModel):
    """Normalized boundary data ``t_i(0) = λ_i/λ₄``."""

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    t0: tuple[float, float, float]
    """The three anisotropy ratios at conformal infinity."""

    @pydantic.field_validator("t0")
    @classmethod
    def _positive(
        cls, value: tuple[float, float, float]
    ) -> tuple[float, float, float]:
        if not all(np.isfinite(v) and v > 0 for v in value):
            raise ValueError(f"Ratios t_i(0) must be positive: {value}")
        return value

    @classmethod
    def from_lambda(cls, lambda_: cabc.Sequence[float]) -> BoundaryData:
        """Normalize four boundary coefficients by λ₄."""
        _check_lambda(lambda_)
        t0 = tuple(lam / lambda_[3] for lam in lambda_[:3])
        return cls(t0=t0)  # type: ignore[arg-type]

    @property
    def is_round(self) -> bool:
        """Whether all ratios are exactly 1."""
        return all(v == 1.0 for v in self.t0)

    def sorted_descending(self) -> tuple[float, float, float]:
        """Return the ratios with ``t₁(0) >= t₂(0) >= t₃(0)``."""
        a, b, c = sorted(self.t0, reverse=True)
        return (a, b, c)


class ModelParams(pydantic.BaseModel):
    """Problem parameters of one boundary value problem.

    The ratios are stored in the original order of ``lambda_``; the
    canonical order used by the solver is available through
    [boundary_data][sp_einstein_fillings.model.ModelParams.boundary_data].

    Use [create][sp_einstein_fillings.model.ModelParams.create] to
    classify the symmetry automatically.
    """

    model_config = pydantic.ConfigDict(
        frozen=True, extra="forbid", populate_by_name=True
    )

    k: int
    n: int
    lambda_: tuple[float, float, float, float] = pydantic.Field(
        alias="lambda"
    )
    symmetry: SymmetryClass
    permutation: tuple[int, int, int] = (0, 1, 2)

    @pydantic.model_validator(mode="before")
    @classmethod
    def _fill_dimension(cls, data: t.Any) -> t.Any:
        if isinstance(data, dict) and "n" not in data and "k" in data:
            data = {**data, "n": dimension_from_k(data["k"])}
        return data

    @pydantic.model_validator(mode="after")
    def _consistent(self) -> ModelParams:
        if self.n != dimension_from_k(self.k):
            raise ValueError(f"n must equal 4k+3, got n={self.n} k={self.k}")
        _check_lambda(self.lambda_)
        if sorted(self.permutation) != [0, 1, 2]:
            raise ValueError(f"Not a permutation: {self.permutation}")
        t0 = self.boundary_data().t0
        if self.symmetry is SymmetryClass.SP1 and not (
            _agree(t0[0], t0[1], DEFAULT_SYMMETRY_TOL)
            and _agree(t0[1], t0[2], DEFAULT_SYMMETRY_TOL)
        ):
            raise ValueError(f"Ratios are not all equal: {t0}")
        if self.symmetry is SymmetryClass.U1 and not _agree(
            t0[1], t0[2], DEFAULT_SYMMETRY_TOL
        ):
            raise ValueError(f"Ratios in slots 2 and 3 differ: {t0}")
        return self

    @classmethod
    def create(
        cls,
        k: int,
        lambda_: cabc.Sequence[float],
        symmetry: SymmetryClass | str | None = None,
        *,
        tol: float = DEFAULT_SYMMETRY_TOL,
    ) -> ModelParams:
        """Build parameters, classifying the symmetry unless forced.

        Parameters
        ----------
        k
            Quaternionic rank, ``n = 4k+3``.
        lambda_
            Boundary coefficients λ₁..λ₄.
        symmetry
            ``None`` or ``"auto"`` classifies from ``lambda_``. An
            explicit class is honoured when the data have its pattern:
            ``FULL`` always, ``U1`` also on ``SP1`` data (``t₂ = t₃``
            holds there). A reduced class on data without the pattern is
            rejected.
        tol
            Relative tolerance of the classification.

        Raises
        ------
        InvalidParameterError
            On invalid ``k``, non-positive coefficients or an
            inconsistent forced class.
        """
        n = dimension_from_k(k)
        lam = tuple(float(v) for v in lambda_)
        detected = classify_symmetry(lam, tol)
        if symmetry is None or symmetry == "auto":
            chosen = detected
        else:
            forced = SymmetryClass(symmetry)
            if forced is SymmetryClass.FULL:
                chosen = SymmetryClassification(forced, (0, 1, 2))
            elif forced is detected.symmetry:
                chosen = detected
            elif (
                forced is SymmetryClass.U1
                and detected.symmetry is SymmetryClass.SP1
            ):
                chosen = SymmetryClassification(forced, (0, 1, 2))
            else:
                raise errors.InvalidParameterError(
                    f"Boundary data {lam} do not have {forced.value} symmetry"
                    f" (detected {detected.symmetry.value})"
                )
        try:
            return cls(
                k=k,
                n=n,
                lambda_=lam,  # type: ignore[arg-type]
                symmetry=chosen.symmetry,
                permutation=chosen.permutation,
            )
        except pydantic.ValidationError as err:
            raise errors.InvalidParameterError(str(err)) from err

    @property
    def m(self) -> int:
        """Number of unknown profiles."""
        return self.symmetry.unknowns

    def boundary_data(self) -> BoundaryData:
        """Return the ratios in canonical (solver) order."""
        ratios = [lam / self.lambda_[3] for lam in self.lambda_[:3]]
        t0 = tuple(ratios[p] for p in self.permutation)
        return BoundaryData(t0=t0)  # type: ignore[arg-type]

    def with_boundary_data(self, bd: BoundaryData) -> ModelParams:
        """Return a copy whose canonical ratios are ``bd``.

        The permutation and symmetry class are preserved.
        """
        original = [0.0, 0.0, 0.0]
        for slot, source in enumerate(self.permutation):
            original[source] = bd.t0[slot]
        return self.model_copy(
            update={"lambda_": (*original, 1.0)}, deep=True
        )


def t1_star(t2: FloatOrArray, n: int) -> FloatOrArray:
    """Return ``((n+5)t₂² − 4t₂³) / ((n−1)t₂² + 2)``.

    This is the value of ``t₁`` at which the U(1) forcing of the ``t₁``
    equation vanishes for a given ``t₂``.
    """
    t2sq = t2 * t2
    return ((n + 5) * t2sq - 4 * t2sq * t2) / ((n - 1) * t2sq + 2)


def t_upper_bound(t1_0: float, t3_0: float, n: int) -> float:
    """Return ``max{1, t₁(0), (n+5)/(n−1+4t₃(0)/t₁(0))}``.

    The caller passes the largest ratio as ``t1_0`` and the smallest as
    ``t3_0``.
    """
    return max(1.0, t1_0, (n + 5) / (n - 1 + 4 * t3_0 / t1_0))


def t1_threshold(n: int) -> float:
    """Return the SP1 threshold ``t₁⁰ < 1``."""
    a = 3 * n + 15
    b = (n + 3) ** 2
    return float((a + np.sqrt(a * a + 4 * (2 * n - 6) * b)) / (2 * b))


def weyl_cap(n: int) -> float:
    """Return ``√(n(n²−1))``, the a priori cap on the Weyl norm."""
    return float(np.sqrt(n * (n * n - 1)))


def sp1_t1_lower_bound(n: int) -> float:
    """Return ``(6/(n(n−1)))^{n/(n−3)}``, a floor for SP1 solutions."""
    return float((6 / (n * (n - 1))) ** (n / (n - 3)))


def sp1_extremum_threshold(n: int) -> float:
    """Return ``2/(n+3)``, separating SP1 local maxima and minima."""
    return 2 / (n + 3)


def u1_t2_minimum_cap(n: int) -> float:
    """Return ``4/(n+1)``, strict cap of ``t₂`` at its local minima."""
    return 4 / (n + 1)


def u1_t1_cap_at_t2_minimum(t2: FloatOrArray, n: int) -> FloatOrArray:
    """Return ``(4t₂ − (n+1)t₂²)/(2t₂ + 2)``."""
    return (4 * t2 - (n + 1) * t2 * t2) / (2 * t2 + 2)


def quotient_form(
    t1: FloatOrArray, t2: FloatOrArray, t3: FloatOrArray
) -> FloatOrArray:
    """Return ``2t₁t₂ + 2t₁t₃ + 2t₂t₃ − t₁² − t₂² − t₃²``."""
    return 2 * (t1 * t2 + t1 * t3 + t2 * t3) - t1 * t1 - t2 * t2 - t3 * t3


def tau_quadratic(c13: float, c23: float) -> float:
    """Return ``2C₁₃C₂₃ + 2C₁₃ + 2C₂₃ − C₁₃² − C₂₃² − 1``."""
    return 2 * c13 * c23 + 2 * c13 + 2 * c23 - c13 * c13 - c23 * c23 - 1


def smallness(bd: BoundaryData) -> float:
    """Return ``Σ|1 − t_i(0)|``."""
    return float(sum(abs(1 - v) for v in bd.t0))


def in_stability_range(bd: BoundaryData) -> bool:
    """Whether every ratio lies in ``[2/3, 4/3)``."""
    low, high = STABILITY_RANGE
    return all(low <= v < high for v in bd.t0)


class ConditionReport(pydantic.BaseModel):
    """Evaluation of the structural conditions on boundary data."""

    model_config = pydantic.ConfigDict(frozen=True)

    cond_3_1: tuple[bool, bool, bool]
    """``t_i(0)⁻¹(t_j(0)+t_k(0)) > 1`` for ``i = 1, 2, 3``."""
    tau_margin: float
    """Minimum of the quotient quadratic over the admissible rectangle."""
    sigma_floor: float
    """Smallest ratio ``σ = min t_i(0)``."""
    smallness: float
    """``Σ|1 − t_i(0)|``."""
    in_stability_range: bool
    """Whether all ratios lie in ``[2/3, 4/3)``."""

    @property
    def holds(self) -> bool:
        """Whether all triangle conditions hold and ``τ > 0``."""
        return all(self.cond_3_1) and self.tau_margin > 0


def check_conditions(bd: BoundaryData) -> ConditionReport:
    """Evaluate the triangle conditions and the quotient margin ``τ``.

    The quadratic ``q(C₁₃, C₂₃)`` is concave, so its minimum over the
    rectangle ``1 <= C₁₃ <= t₁(0)/t₃(0)``, ``1 <= C₂₃ <= t₂(0)/t₃(0)``
    (ratios sorted descending) is attained at a corner.
    """
    t0 = bd.t0
    cond = tuple(
        (sum(t0) - t0[i]) / t0[i] > 1 for i in range(3)
    )
    s1, s2, s3 = bd.sorted_descending()
    corners = itertools.product((1.0, s1 / s3), (1.0, s2 / s3))
    tau = min(tau_quadratic(c13, c23) for c13, c23 in corners)
    return ConditionReport(
        cond_3_1=cond,  # type: ignore[arg-type]
        tau_margin=tau,
        sigma_floor=min(t0),
        smallness=smallness(bd),
        in_stability_range=in_stability_range(bd),
    )


def k0_lower_bound(bd: BoundaryData, n: int, tau: float) -> float:
    """Return the lower bound of ``K(0)`` implied by the Yamabe bracket.

    ``K^{1/n}(0) >= (t₁t₂t₃)^{1/n}[(n−3)(n+5−Σt) + 2τt₃/(t₁t₂)]/(n(n−1))``
    with the ratios sorted descending. A non-positive bracket yields 0.
    """
    s1, s2, s3 = bd.sorted_descending()
    bracket = (n - 3) * (n + 5 - s1 - s2 - s3) + 2 * tau * s3 / (s1 * s2)
    if bracket <= 0:
        return 0.0
    root = (s1 * s2 * s3) ** (1 / n) * bracket / (n * (n - 1))
    return float(root**n)
