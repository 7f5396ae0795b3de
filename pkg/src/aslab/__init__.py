"""Exact computation toolkit for Tsirelson-type norms, Schreier families and asymptotic games."""

__version__ = "0.1.0"
