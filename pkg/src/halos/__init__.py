"""Certified computations with Banach halos, their modules and short isometry groups."""

__version__ = "0.1.0"
