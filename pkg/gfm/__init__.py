"""Gradient-free methods for Lipschitz nonsmooth nonconvex objectives."""

__version__ = "1.0.0"
