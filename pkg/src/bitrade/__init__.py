"""Abelian sandpile groups, directed Eulerian spherical embeddings and the
canonical groups of spherical latin bitrades."""

__version__ = "0.1.0"
