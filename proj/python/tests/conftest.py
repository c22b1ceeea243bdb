# Copyright 2026 The amris Authors.
# SPDX-License-Identifier: Apache-2.0

import importlib.util
import sys

if importlib.util.find_spec("amris") is None or importlib.util.find_spec("amris._core") is None:
    print("amris extension not installed; run `pip install --no-build-isolation .`")
    sys.exit(77)
