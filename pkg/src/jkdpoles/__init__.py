"""Pole-residue representations of the JKD dynamic tortuosity."""

__version__ = "0.1.0"
