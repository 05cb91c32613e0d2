"""Quantitative article-quality indicators compared across groups of journals."""

__version__ = "0.1.0"
