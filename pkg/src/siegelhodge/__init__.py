"""Exact Hodge-theoretic linear algebra and reduction theory for period maps."""

__version__ = "0.1.0"
