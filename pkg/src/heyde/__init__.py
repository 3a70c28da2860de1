"""Probability on locally compact abelian groups: Heyde-type characterization checks."""

__version__ = "0.1.0"
