"""Exact lattices over the Kronecker order O[X, Y]/(X^2, Y^2)."""

__version__ = "0.1.0"
