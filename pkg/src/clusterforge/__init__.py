"""Exact-arithmetic toolkit for cluster algebra seeds, bounds and cells."""

__version__ = "0.1.0"
