"""Symbolic engine for Lie-symmetry analysis and preliminary group
classification of second-order evolution equations."""

__version__ = "0.1.0"
