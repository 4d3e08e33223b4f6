"""Finite-volume laboratory for Schrödinger operators with decaying fat-tailed random potentials."""

__version__ = "0.1.0"
