"""Numerical toolkit for regularized Dirac seas, local correlation operators and hole states."""

__version__ = "0.1.0"
