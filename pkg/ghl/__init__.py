"""Exact classical, symmetric and exterior (co)homology of finite groups."""

__version__ = "0.1.0"
