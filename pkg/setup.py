#!/usr/bin/env python

# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0

import setuptools

setuptools.setup()
