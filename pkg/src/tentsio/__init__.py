"""Weighted tent spaces, maximal-regularity operators and off-diagonal decay."""

__version__ = "0.1.0"
