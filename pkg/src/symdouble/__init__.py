"""Exact verification toolkit for double groupoids, VB-groupoid duality and
Poisson double groupoids on coordinate model families."""

__version__ = "0.1.0"
