"""Exact computations for Goursat distributions and their normal forms."""

__version__ = "0.1.0"
