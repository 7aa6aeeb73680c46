"""Exact computations with logarithmic forms and derivations of Coxeter arrangements."""

__version__ = "0.1.0"
