"""Discrete Allen-Cahn minimisers on Gromov-hyperbolic graphs with a
finite boundary-at-infinity model."""

__version__ = "0.1.0"
