"""Toda Hamiltonians in cluster coordinates, computed four ways."""

__version__ = "0.1.0"
