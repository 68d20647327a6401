# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Conformally compact Einstein fillings of Sp(k+1)-invariant spheres.

The package solves the singular two-point boundary value problem of the
cohomogeneity-one Einstein equations on the unit ball, with boundary
data an Sp(k+1)-invariant metric on ``S^{4k+3}``, and verifies the
structural properties of the computed solutions.

- [model][sp_einstein_fillings.model]: parameters, boundary data and
  closed-form constants.
- [ode_system][sp_einstein_fillings.ode_system]: residuals and
  Jacobians of the ODE system.
- [endpoint_series][sp_einstein_fillings.endpoint_series]: truncated
  series at both singular endpoints.
- [bvp_solver][sp_einstein_fillings.bvp_solver]: collocation, Newton,
  continuation and the shooting oracle.
- [diagnostics][sp_einstein_fillings.diagnostics]: verification of
  converged solutions.
"""

from __future__ import annotations

from importlib import metadata

try:
    __version__ = metadata.version("sp-einstein-fillings")
except metadata.PackageNotFoundError:
    __version__ = "0.0.0+unknown"
del metadata
