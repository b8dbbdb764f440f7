"""Equality discovery and facet mining for integer programs given by their solution sets."""

__version__ = "0.1.0"
