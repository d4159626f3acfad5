"""Numerical checks for discrete pluri-Lagrangian systems on Z^m."""

__version__ = "0.1.0"
