"""Exact string topology operations for formal Poincare duality algebras."""

__version__ = "0.1.0"
