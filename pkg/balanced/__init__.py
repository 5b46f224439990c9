"""Balanced Abelian-group labelings of directed multigraphs."""

__version__ = "1.0.0"
