"""Runge-method workbench for split-Cartan modular curves."""

__version__ = "0.1.0"
