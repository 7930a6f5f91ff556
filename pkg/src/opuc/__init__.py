"""Orthogonal polynomials on the unit circle: coefficients, measures, CMV matrices."""

__version__ = "0.1.0"
