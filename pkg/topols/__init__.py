"""Lattice-surgery compiler built on a ZX-diagram intermediate representation."""

__version__ = "0.1.0"
