# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Arithmetic on truncated power series.

A series is a 1-D array ``a`` of coefficients with ``a[p]`` belonging to
``z^p``. All operations truncate to the length of their first argument.
"""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

Series = npt.NDArray[np.float64]


def mul(a: Series, b: Series) -> Series:
    return np.convolve(a, b)[: len(a)]


def exp(a: Series) -> Series:
    """Return ``exp(a)`` via ``e_k = (1/k) Σ_j j a_j e_{k-j}``."""
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for k in range(1, len(a)):
        j = np.arange(1, k + 1)
        out[k] = np.dot(j * a[1 : k + 1], out[k - 1 :: -1][:k]) / k
    return out


def reciprocal(a: Series) -> Series:
    if a[0] == 0:
        raise ZeroDivisionError("Series has no reciprocal")
    out = np.zeros_like(a)
    out[0] = 1 / a[0]
    for k in range(1, len(a)):
        out[k] = -np.dot(a[1 : k + 1], out[k - 1 :: -1][:k]) / a[0]
    return out


def deriv(a: Series) -> Series:
    """Differentiate, keeping the length (top coefficient becomes 0)."""
    out = np.zeros_like(a)
    out[:-1] = a[1:] * np.arange(1, len(a))
    return out


def polynomial(coefficients: list[float], length: int) -> Series:
    out = np.zeros(length)
    size = min(len(coefficients), length)
    out[:size] = coefficients[:size]
    return out


def constant(value: float, length: int) -> Series:
    out = np.zeros(length)
    out[0] = value
    return out


def forcing(t3: list[Series], n: int) -> list[Series]:
    """Return the brackets ``F_i`` of the ``t_i`` equations as series."""
    product = mul(mul(t3[0], t3[1]), t3[2])
    inverse = reciprocal(product)
    total = t3[0] + t3[1] + t3[2]
    out = []
    for i in range(3):
        j, k = (idx for idx in range(3) if idx != i)
        diff = t3[j] - t3[k]
        g = mul(t3[i], t3[i]) - mul(diff, diff)
        linear = (n - 1) * t3[i] + 2 * (total - t3[i])
        out.append(
            linear - constant(n + 5, len(total)) + 2 * mul(g, inverse)
        )
    return out


def psi(d4: list[Series], n: int) -> Series:
    q4 = d4[1] + d4[2] + d4[3]
    out = (n - 3) * mul(q4, q4)
    for i in range(1, 4):
        q = n * d4[i] - q4
        out = out + mul(q, q)
    return out
