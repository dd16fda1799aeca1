"""Desk-scale gate-based quantum simulator and quantum scientific-computing algorithms."""

__version__ = "0.1.0"
