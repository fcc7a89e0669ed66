# SPDX-License-Identifier: Apache-2.0
# Copyright the homwalk authors
import sys

from .cli import main

sys.exit(main())
