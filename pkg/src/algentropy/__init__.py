"""Exact algebraic entropy for endomorphisms of discrete locally finite groups."""
__version__ = "0.1.0"
