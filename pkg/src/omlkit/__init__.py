"""Finite quantum event algebras, their Boolean frames, and Kochen-Specker search."""

__version__ = "0.1.0"
