"""Structured-grid solver for compressible Euler and its IGR / TIGRE regularizations."""

__version__ = "0.1.0"
