"""Constraint programming search with a learned value-selection heuristic."""

__version__ = "0.1.0"
