"""Numerical tools for the classical and truncated moment problem."""

__version__ = "0.1.0"
