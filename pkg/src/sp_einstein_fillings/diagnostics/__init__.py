# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Verification of structural properties of converged solutions.

All diagnostics are read-only over a
[SolveResult][sp_einstein_fillings.bvp_solver.SolveResult]. Derivatives
are those stored on the solution grid; nothing is differentiated by
finite differences.
"""

from __future__ import annotations

from .extrema import *
from .extrema import __all__ as _extrema_all
from .qualitative import *
from .qualitative import __all__ as _qualitative_all
from .reports import *
from .reports import __all__ as _reports_all
from .variation import *
from .variation import __all__ as _variation_all
from .weyl import *
from .weyl import __all__ as _weyl_all

__all__ = [
    *_extrema_all,
    *_qualitative_all,
    *_reports_all,
    *_variation_all,
    *_weyl_all,
]
