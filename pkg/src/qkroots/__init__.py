"""Exact and numerical checks for quantum difference equations at roots of unity."""
__version__ = "0.1.0"
