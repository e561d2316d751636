"""Numerical laboratory for analytic discs attached to CR submanifolds."""

__version__ = "0.1.0"
