"""Directional topological descriptors and direction-circle stratifications of
planar simplicial complexes."""

__version__ = "0.1.0"
