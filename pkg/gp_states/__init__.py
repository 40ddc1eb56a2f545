"""Geometric progression states on Cuntz algebras."""

__version__ = "0.1.0"
