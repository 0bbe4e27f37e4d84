"""Conditional extreme value models and the tails of their products."""

__version__ = "0.1.0"
