# Location: src/latgauge/__init__.py
"""Periodic 2D lattice gauge toy model."""

from latgauge.lattice import GridSpec, ScalarField, VectorField

__all__ = ["GridSpec", "ScalarField", "VectorField"]
__version__ = "0.1.0"
