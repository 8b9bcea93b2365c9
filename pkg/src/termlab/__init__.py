"""Termination analysis for small interactive integer while-loops."""

__version__ = "0.1.0"
