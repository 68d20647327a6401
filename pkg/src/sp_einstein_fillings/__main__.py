# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
import sys

from .cli import main

sys.exit(main())
