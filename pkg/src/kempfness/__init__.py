"""Maximal weights, boundary actions and Kempf-Ness flows for matrix groups."""

__version__ = "0.1.0"
