"""Exact computations on tight sets of hyperbolic quadrics Q+(2r-1, q)."""

__version__ = "0.1.0"
