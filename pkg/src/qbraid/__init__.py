"""Exact toric and braid-group computations for the crepant resolution of 1/7(1,2,4)."""

__version__ = "0.1.0"
