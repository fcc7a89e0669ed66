# SPDX-License-Identifier: Apache-2.0
# Copyright the homwalk authors
"""Figures and independently recomputed fits for homwalk experiment CSVs."""

from .figures import KINDS, FigureSpec, render
from .schema import SchemaError

__all__ = ["KINDS", "FigureSpec", "SchemaError", "render"]
