"""Qudit circuit constructions, trajectory noise simulation and Toffoli-aware routing."""

__version__ = "0.1.0"
