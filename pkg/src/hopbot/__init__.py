"""Simulation and feasibility toolkit for a small rocket-hopping spherical robot."""

__version__ = "0.1.0"
