"""Simplicial Kuramoto dynamics, diagnostics and simulated quantum estimators."""

__version__ = "0.1.0"
