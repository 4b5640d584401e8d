"""Exact verification of Hopf algebroids, cotwists and jet dualities."""

__version__ = "0.1.0"
