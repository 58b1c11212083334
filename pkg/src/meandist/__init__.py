"""Integral of the distance function on model spaces and discrete manifolds."""

__version__ = "0.1.0"
