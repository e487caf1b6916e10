"""Counting, lifting and sieving integral points on homogeneous varieties."""

__version__ = "0.1.0"
