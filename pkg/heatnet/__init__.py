"""Optimal control of district heating networks."""

__version__ = "0.1.0"
